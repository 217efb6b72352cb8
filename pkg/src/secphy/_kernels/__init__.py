"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The Cython module (secphy._kernels._speedups) and the numpy reference
(secphy._kernels._pyref) implement the same functions with identical
shapes, dtypes and semantics:

    rs_encode_batch(msgs, gen_mul)                  -> parity
    rs_syndromes_batch(cws, exp, log, npar, go)     -> syndromes
    rs_decode_batch(cws, exp, log, npar, go, t)     -> corrected counts
    viterbi_decode(obs, out_a, out_b, force_end0)   -> decoded bits
    des_encrypt_block / des_decrypt_block(v, subkeys)
    cbc_encrypt_u64 / cbc_decrypt_u64(blocks, subkeys, iv)
    cbc_mac_u64(blocks, subkeys)

Selection: the compiled module when importable, else the fallback.
Override with SECPHY_KERNELS=c (require compiled, raise if missing) or
SECPHY_KERNELS=py (force the fallback).  `BACKEND` reports the choice.
"""
from __future__ import annotations

import os

_choice = os.environ.get("SECPHY_KERNELS", "auto").lower()

if _choice in ("auto", "", "c", "cython"):
    try:
        from secphy._kernels import _speedups as _impl
    except ImportError:
        if _choice in ("c", "cython"):
            raise ImportError(
                "SECPHY_KERNELS=c but the compiled kernels are not built; "
                "run pip install -e . (without SECPHY_NO_EXT)")
        from secphy._kernels import _pyref as _impl
elif _choice in ("py", "python"):
    from secphy._kernels import _pyref as _impl
else:
    raise ValueError(f"SECPHY_KERNELS={_choice!r}: expected auto, c, or py")

BACKEND = _impl.BACKEND_NAME

rs_encode_batch = _impl.rs_encode_batch
rs_syndromes_batch = _impl.rs_syndromes_batch
rs_decode_batch = _impl.rs_decode_batch
viterbi_decode = _impl.viterbi_decode
des_encrypt_block = _impl.des_encrypt_block
des_decrypt_block = _impl.des_decrypt_block
cbc_encrypt_u64 = _impl.cbc_encrypt_u64
cbc_decrypt_u64 = _impl.cbc_decrypt_u64
cbc_mac_u64 = _impl.cbc_mac_u64
