"""tapekit: exact, tape-based semantics for probabilistic programs.

Programs are combinator codes that read bits from an explicit random tape.
Symbolic execution turns a program into a finite decision tree over tape
addresses, from which truth values, laws and expectations are computed with
exact rational arithmetic.
"""
from .dist import (BOTTOM, FinDist, MustJudgment, bridge_prob_one, check_law_split_seq,
                   check_must_modality_axioms, dirac, dist_bind, law, must, must_entail)
from .errors import (ArityError, DegenerateMeasureError, EmptyFamily, ParseError,
                     PropositionUndefined, TapekitError, TransportFault, UnsupportedPushforward)
from .extraction import (check_extract_reindex, event_probability, expect, extraction_soundness,
                         prob_one_collapse)
from .lang import (Bottom, Code, Value, bracket_abstract, eval_code, label, lam, parse_code, run,
                   to_sexpr)
from .modality import (TOP, Const, CrispLift, EntailmentJudgment, TestTable, check_entailment,
                       check_modality_axioms, diamond, transport_entailment)
from .tapes import (Address, BitPattern, ProductMeasure, Tape, TapeMapSpec, TapeSpace,
                    apply_tapemap, builtin_map, parse_tape, pattern_measure, preimage_pattern,
                    pushforward_measure, tape_read)
from .trees import Branch, Leaf, bind, bind_split, mca_apply, reindex, ret, trace, translate_evidence
from .truth import (TruthValue, ess_inf, ess_sup, tv_equal, tv_impl, tv_join, tv_leq, tv_leq_as,
                    tv_meet, tv_pullback)

__version__ = "0.1.0"
