"""String diagrams for copy-discard categories, evaluated in finite semantics.

Three backends interpret terms: sub-stochastic kernels (``finstoch``),
partial functions (``par``) and relations (``rel``).  On top sit deciders
for the restriction order and the conditional preorder, conditionals and
Bayesian inversion, and seeded law-checking suites.
"""

__version__ = "0.1.0"

from .backend import BACKEND_NAMES, DEFAULT_TOL, Backend, evaluate, get_backend
from .diagram import (
    UNIT, Cap, Compare, Copy, Discard, Gen, GeneratorDecl, Id, ObjectType, Par, Seq, Signature,
    Swap, Unit, load_signature, obj, par, seq, signature_from_dict, signature_to_dict, typecheck,
)
from .discrete import PAR, REL, FinRel, PartialFn
from .errors import (
    CapabilityError, DiagramSyntaxError, DimensionMismatch, InputError, MissingPayload,
    NotComparable, NotQuasiTotal, PMCError, SignatureError, TooLarge, TypeMismatch,
    UnknownGenerator, UnknownObject, UnsupportedStructural,
)
from .finstoch import FINSTOCH, SubKernel, kernel
from .inference import (
    JointFactorization, bayes_invert, cond_compose, conditional, is_conditional,
    is_least_conditional_sample,
)
from .laws import (
    SUITES, LawReport, check_balanced, check_cancellative, check_cauchy_schwarz, check_means,
    check_validity_increase, is_zero_scalar, run_suite, validity,
)
from .order import (
    OrderVerdict, conditional_leq, generic_witness_search, restriction_leq, sharp_witness,
)
from .text import SourceSpan, parse, render
