"""Many-to-one power map ``c = m**x mod n``: root classes, tags, and a
simulated multi-user authentication protocol built on them."""

from .errors import ManyRootError
from .modmath import crt_combine, egcd, inv_mod, is_prime, pow_mod, totient_semiprime
from .tagcodec import TaggedCipher, tag_decode, tag_encode, verify_tagged
from .transform import (
    ParamSet,
    RootClass,
    encrypt,
    make_params,
    product_of_roots,
    roots_bruteforce,
    roots_crt,
    roots_of_unity,
)

__all__ = [
    "ManyRootError",
    "ParamSet",
    "RootClass",
    "TaggedCipher",
    "crt_combine",
    "egcd",
    "encrypt",
    "inv_mod",
    "is_prime",
    "make_params",
    "pow_mod",
    "product_of_roots",
    "roots_bruteforce",
    "roots_crt",
    "roots_of_unity",
    "tag_decode",
    "tag_encode",
    "totient_semiprime",
    "verify_tagged",
]
__version__ = "0.1.0"
