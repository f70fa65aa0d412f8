//! LC circuits: netlists, Kirchhoff subspaces, the constraint chain in closed form, and the
//! embedding into `T*TE`.

mod embed;
mod netlist;
mod reduced;
mod spaces;

pub use embed::{circuit_energy, embed, EmbeddedCircuit, Preset};
pub use netlist::{parse_netlist, Branch, Mode, Netlist};
pub use reduced::{circuit_energy_on_pontryagin, reduced_matches_flow, reduced_system, ReducedSystem};
pub use spaces::{
    build_spaces, circuit_system, closed_form_chain, closed_form_set, constraint_chain,
    delta_chain, fundamental_cycles, incidence_rows, loop_report, state_from, CircuitSpaces,
    LoopClasses, LoopReport,
};

/// The four-branch example: `L`, `C1`, `C2`, `C3` with distinct values.
pub const FIGURE1_JSON: &str = include_str!("../../fixtures/figure1.json");
/// The same circuit with every `L` and `C` equal to 1.
pub const FIGURE1_UNIT_JSON: &str = include_str!("../../fixtures/figure1_unit.json");
