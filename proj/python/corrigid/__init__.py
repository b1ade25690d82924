# Copyright 2026 the corrigid authors
# SPDX-License-Identifier: Apache-2.0
"""Exact-rational auction toolkit.

Thin pythonic wrapper over the `_corrigid` extension. Structured values
cross the boundary as JSON text in the same formats the command line tool
reads and writes; this module converts to and from dicts so callers never
touch serialized strings. All numbers stay exact: rationals are "p/q"
strings, never floats.
"""

import json

try:
    from . import _corrigid as _core
except ImportError:  # running against a build tree, extension on sys.path
    import _corrigid as _core

__all__ = [
    "version",
    "gen_random_high_values",
    "gen_geometric",
    "gen_k_excluded",
    "gen_family_member",
    "validate_set",
    "validate_distribution",
    "parameters",
    "embed",
    "reference_mechanism",
    "check_feasible",
    "check_interim_ir",
    "expost_revenue",
    "interim_revenue",
    "expected_welfare",
    "full_rank",
    "lookahead",
    "cm_fees",
    "optimal_fees",
    "brute_force_expost",
    "brute_force_interim",
    "rigidity",
    "corruption_curve",
    "allocation_string",
    "decode_allocation_string",
    "kc_inequality",
    "sha256_hex",
]


def _dumps(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def version():
    """Library name and version, e.g. "corrigid 0.1.0"."""
    return _core.version()


def gen_random_high_values(n, m, seed):
    return json.loads(_core.gen_random_high_values(n, m, seed))


def gen_geometric(n, m, seed):
    return json.loads(_core.gen_geometric(n, m, seed))


def gen_k_excluded(n, k, m, eps="1/10"):
    return json.loads(_core.gen_k_excluded(n, k, m, eps))


def gen_family_member(n, m, pattern, seed):
    return json.loads(_core.gen_family_member(n, m, pattern, seed))


def validate_set(s):
    """List of problems with a set dict; empty means valid."""
    return list(_core.validate_set(_dumps(s)))


def validate_distribution(d):
    return list(_core.validate_distribution(_dumps(d)))


def parameters(s):
    """Derived quantities of a valid set (d_i, g_i, alpha_j, c_S, ...)."""
    return json.loads(_core.parameters(_dumps(s)))


def embed(s):
    """Build the full prior bundle for a set: constants, support, tags."""
    return json.loads(_core.embed(_dumps(s)))


def reference_mechanism(embedding, almost_linear=False):
    return json.loads(_core.reference_mechanism(_dumps(embedding), almost_linear))


def check_feasible(mechanism, distribution):
    return list(_core.check_feasible(_dumps(mechanism), _dumps(distribution)))


def check_interim_ir(mechanism, distribution):
    return list(_core.check_interim_ir(_dumps(mechanism), _dumps(distribution)))


def expost_revenue(mechanism, distribution):
    """Expected winner payment, as an exact "p/q" string."""
    return _core.expost_revenue(_dumps(mechanism), _dumps(distribution))


def interim_revenue(mechanism, distribution):
    return _core.interim_revenue(_dumps(mechanism), _dumps(distribution))


def expected_welfare(distribution):
    return _core.expected_welfare(_dumps(distribution))


def full_rank(distribution):
    return _core.full_rank(_dumps(distribution))


def lookahead(distribution):
    return json.loads(_core.lookahead(_dumps(distribution)))


def cm_fees(distribution):
    """Full-surplus fee construction; {"ok": False, "error": ...} when the
    prior's conditional matrices are rank deficient."""
    return json.loads(_core.cm_fees(_dumps(distribution)))


def optimal_fees(mechanism, distribution):
    return json.loads(_core.optimal_fees(_dumps(mechanism), _dumps(distribution)))


def brute_force_expost(distribution, top=0, cap=2_000_000):
    return json.loads(_core.brute_force_expost(_dumps(distribution), top, cap))


def brute_force_interim(distribution, cap=2_000_000, seed=1, count=4096):
    return json.loads(_core.brute_force_interim(_dumps(distribution), cap, seed, count))


def rigidity(embedding, sampled=False, count=10_000, seed=1, slack=None,
             full_cap=2_000_000):
    """Audit mechanisms over an embedded prior against both revenue
    ceilings. slack defaults to the embedding's omega."""
    return json.loads(
        _core.rigidity(_dumps(embedding), sampled, count, seed, slack or "",
                       full_cap))


def corruption_curve(embedding, fractions, seed=1):
    """CSV text with columns fraction, x, revenue_ratio, bound."""
    return _core.corruption_curve(_dumps(embedding), [str(f) for f in fractions],
                                  seed)


def allocation_string(distribution, plan, order="cm"):
    return _core.allocation_string(_dumps(distribution), _dumps(plan), order)


def decode_allocation_string(distribution, text, order="cm"):
    return json.loads(_core.decode_allocation_string(_dumps(distribution), text,
                                                     order))


def kc_inequality(k, r, g, n, t, x):
    return json.loads(_core.kc_inequality(k, r, g, n, t, str(x)))


def sha256_hex(data):
    """Hex digest of str (utf-8) or bytes."""
    return _core.sha256_hex(data)
