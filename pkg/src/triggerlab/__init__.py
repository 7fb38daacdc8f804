"""triggerlab: quantify and solve hidden-trigger event prediction.

The package answers three questions about event-generating element
streams whose triggers are partly unobservable: how likely a trigger of
a given length is to sit inside a window (`prob`, `sim`), how long the
window and how much data must be to pin the trigger down (`plan`), and
which trigger it actually was, inferred from synthetic labelled data by
candidate elimination (`datagen`, `infer`).
"""

from .core import (
    Element,
    HiddenConstraint,
    MatchMode,
    ProblemParams,
    Sequence,
    TriggerPattern,
    contains,
    default_letters,
    parse_pattern,
    parse_sequence,
    render_pattern,
    render_sequence,
    render_tokens,
    tokens_contain,
)
from .datagen import (
    GroundTruth,
    Scenario,
    StreamConfig,
    WindowRecord,
    generate_stream,
    random_trigger,
    read_dataset,
    window_dataset,
    write_dataset,
)
from .infer import CandidateTable, InferenceReport, eliminate, enumerate_candidates, infer_trigger
from .plan import DataPlan, data_plan, difficulty_curve, min_window
from .prob import (
    count_noncontaining,
    p_binom,
    p_iter,
    p_negbinom,
    p_rec,
    p_repeated,
    p_same_hidden,
    q_apparent,
)
from .rng import Rng, derive_seed
from .sim import McEstimate, dp_probability, exact_enumeration, mc_probability

__version__ = "0.1.0"
