//! The operation registry: every library operation and the subcommand that
//! reaches it. Used by the coverage test.

pub struct RegistryEntry {
    pub module: &'static str,
    pub operation: &'static str,
    pub subcommand: &'static str,
}

pub const REGISTRY: &[RegistryEntry] = &[
    RegistryEntry { module: "graph-core", operation: "validate", subcommand: "graph validate" },
    RegistryEntry { module: "graph-core", operation: "genus", subcommand: "graph genus" },
    RegistryEntry { module: "graph-core", operation: "contract_edge", subcommand: "graph contract" },
    RegistryEntry { module: "graph-core", operation: "stretch_edge", subcommand: "graph stretch" },
    RegistryEntry { module: "graph-core", operation: "automorphisms", subcommand: "graph autos" },
    RegistryEntry {
        module: "graph-core",
        operation: "cycle_rigidifications",
        subcommand: "graph rigidify",
    },
    RegistryEntry { module: "moduli-fan", operation: "build_m0n", subcommand: "moduli info" },
    RegistryEntry {
        module: "moduli-fan",
        operation: "distance_coordinates",
        subcommand: "moduli point",
    },
    RegistryEntry { module: "moduli-fan", operation: "forgetful_map", subcommand: "moduli forget" },
    RegistryEntry { module: "moduli-fan", operation: "atlas_cone", subcommand: "moduli atlas" },
    RegistryEntry { module: "cross-ratio", operation: "evaluate", subcommand: "crossratio eval" },
    RegistryEntry {
        module: "cross-ratio",
        operation: "decompose_primitive",
        subcommand: "crossratio decompose",
    },
    RegistryEntry {
        module: "cross-ratio",
        operation: "pullback_to_distance",
        subcommand: "crossratio distfun",
    },
    RegistryEntry {
        module: "tropical-cycles",
        operation: "check_balancing",
        subcommand: "cycles balance",
    },
    RegistryEntry {
        module: "tropical-cycles",
        operation: "divisor_intersect",
        subcommand: "cycles intersect",
    },
    RegistryEntry { module: "tropical-cycles", operation: "push_forward", subcommand: "cycles push" },
    RegistryEntry { module: "tropical-cycles", operation: "degree", subcommand: "cycles degree" },
    RegistryEntry { module: "tropical-cycles", operation: "lattice_index", subcommand: "cycles index" },
    RegistryEntry {
        module: "tropical-cycles",
        operation: "c1_from_cocycle",
        subcommand: "cycles chern",
    },
    RegistryEntry { module: "psi-classes", operation: "psi_representative", subcommand: "psi represent" },
    RegistryEntry { module: "psi-classes", operation: "psi_product_degree", subcommand: "psi degree" },
    RegistryEntry { module: "psi-classes", operation: "pullback_check", subcommand: "psi pullcheck" },
    RegistryEntry {
        module: "psi-classes",
        operation: "dilaton_pushforward",
        subcommand: "psi dilaton",
    },
    RegistryEntry {
        module: "genus-one-families",
        operation: "psi_pullback_degree",
        subcommand: "elliptic psi",
    },
    RegistryEntry { module: "genus-one-families", operation: "isom_fan", subcommand: "elliptic isom" },
    RegistryEntry {
        module: "genus-one-families",
        operation: "cover_class_table",
        subcommand: "covers table",
    },
    RegistryEntry { module: "genus-one-families", operation: "source_degree", subcommand: "covers degrees" },
    RegistryEntry { module: "genus-one-families", operation: "branch_degree", subcommand: "covers degrees" },
    RegistryEntry {
        module: "genus-one-families",
        operation: "psi_covers_degree",
        subcommand: "covers degrees",
    },
    RegistryEntry { module: "genus-one-families", operation: "local_rh_check", subcommand: "covers rh" },
    RegistryEntry {
        module: "stable-maps-pencil",
        operation: "evaluation_matrix",
        subcommand: "pencil matrix",
    },
    RegistryEntry {
        module: "stable-maps-pencil",
        operation: "edge_multiplicity",
        subcommand: "pencil mult",
    },
    RegistryEntry { module: "stable-maps-pencil", operation: "floor_count", subcommand: "floors count" },
    RegistryEntry {
        module: "stable-maps-pencil",
        operation: "pencil_degrees",
        subcommand: "pencil degrees",
    },
    RegistryEntry { module: "cli", operation: "run", subcommand: "verify-all" },
];
