import os
from pathlib import Path

# Engine names
SOURCE = "source"
TARGET = "target"
LOWERED = "lowered"
ENGINES = (SOURCE, TARGET, LOWERED)

# Closure representations
NODE = "node"
SEQ = "seq"
AUTO = "auto"
REPRESENTATIONS = (NODE, SEQ, AUTO)

OPT_LEVELS = (0, 1, 2)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

DEFAULT_ENGINE = TARGET
DEFAULT_REPR = AUTO
DEFAULT_OPT = 1
DEFAULT_SEED = 1

MAX_FIXPOINT_ROUNDS = 50

# Callees at most this large (in AST nodes) are inlined at every call site
INLINE_SIZE_LIMIT = 12

# Generated names
LABEL_PREFIX = "ell_"
DISPATCH_PREFIX = "dispatch_"
CLOSURE_PARAM = "clos"
DISPATCH_ARG_PREFIX = "b"
ENV_TAG = "env"
ATOM_TAG = "atom"
NODE_TAG = "node"

# Random program generator
DEFAULT_MAX_DEPTH = 4
DEFAULT_MAX_ARITY = 2
DEFAULT_ATOM_POOL = (0, 1, 2, 3, 5, 8)
DEFAULT_FUZZ_COUNT = 500

# Exit codes
EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_RUNTIME_ERROR = 4

SOURCE_SUFFIX = ".fq"

CORPUS_ENV_VAR = "DEFUNCQ_CORPUS"
EMBEDDED_CORPUS = str(Path(__file__).resolve().parent.parent / "corpus" / "programs")
CORPUS_LOCATION = os.getenv(CORPUS_ENV_VAR, EMBEDDED_CORPUS)
CORPUS_MANIFEST = "corpus.yaml"
