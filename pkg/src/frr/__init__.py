"""Local fast re-route: simulation, resilience verification and hardness gadgets."""

__version__ = "0.1.0"

from .errors import DocumentError, FrrError, GraphError, PatternError, SizeGuardError
from .model import (
    CombinatorialPattern,
    Graph,
    Instance,
    Link,
    SkippingPattern,
    build_graph,
    edge_connectivity,
    is_connected,
    local_links,
    validate_pattern,
)
from .sim import Trace, query_pattern, route
from .verify import (
    Counterexample,
    Verdict,
    check_witness,
    verify_ideal,
    verify_perfect_exhaustive,
    verify_perfect_lazy,
)
from .oblivious import analyze_component, is_inport_oblivious, synth_oblivious, verify_oblivious
from .gadgets import (
    CnfFormula,
    gen_ideal_gadget,
    gen_perfect_gadget,
    ideal_witness_from_assignment,
    perfect_witness_from_assignment,
    sat_bruteforce,
)
