"""Text formats: market documents, outcome files and reports.

Everything is JSON with rationals written as "p/q" strings ("p" when q = 1).
JSON floats are rejected on input, so no value is ever rounded.
"""
from __future__ import annotations

import json
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .configlp import Allocation
from .itemset import DEMAND_CAP, CapExceeded, items_of, mask_of
from .rational import parse_rational, render_rational
from .valuations import (
    Additive,
    BucketUnit,
    BucketXOS,
    BudgetAdditive,
    ExplicitTable,
    HPlusEpsilonF,
    Market,
    MarketError,
    SingleMinded,
    SymmetricTable,
    UnitDemand,
    Valuation,
    XOSExplicit,
)

SCHEMA = 1


def _reject_float(text: str):
    raise MarketError(f"floating-point literal {text} not allowed; write rationals as \"p/q\" strings")


def load_json(text: str) -> Any:
    try:
        return json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise MarketError(f"malformed JSON: {exc}") from None


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _read(source: str | Path) -> str:
    """File contents, or ``source`` itself when it already looks like a JSON document."""
    if isinstance(source, str) and source.lstrip().startswith("{"):
        return source
    return Path(source).read_text()


# ---------------------------------------------------------------------------
# field helpers

def _field(rec: dict, key: str, where: str):
    if not isinstance(rec, dict):
        raise MarketError(f"{where}: expected an object")
    if key not in rec:
        raise MarketError(f"{where}: missing field {key!r}")
    return rec[key]


def _rational(x, where: str) -> Fraction:
    try:
        return parse_rational(x)
    except ValueError as exc:
        raise MarketError(f"{where}: {exc}") from None


def _rationals(xs, where: str) -> tuple[Fraction, ...]:
    if not isinstance(xs, list):
        raise MarketError(f"{where}: expected a list of rationals")
    return tuple(_rational(x, f"{where}[{k}]") for k, x in enumerate(xs))


def _index(x, m: int, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise MarketError(f"{where}: item index must be an integer, got {x!r}")
    if not 0 <= x < m:
        raise MarketError(f"{where}: item index {x} out of range 0..{m - 1}")
    return x


def _index_set(xs, m: int, where: str) -> int:
    if not isinstance(xs, list):
        raise MarketError(f"{where}: expected a list of item indices")
    idx = [_index(x, m, f"{where}[{k}]") for k, x in enumerate(xs)]
    if len(set(idx)) != len(idx):
        raise MarketError(f"{where}: repeated item index")
    return mask_of(idx)


def _count(values: Sequence, m: int, where: str) -> None:
    if len(values) != m:
        raise MarketError(f"{where}: {len(values)} entries for {m} items")


def _buckets(rec: dict, m: int, where: str) -> tuple[tuple[int, ...], ...]:
    raw = _field(rec, "buckets", where)
    if not isinstance(raw, list):
        raise MarketError(f"{where}.buckets: expected a list of index lists")
    out = []
    for b, bucket in enumerate(raw):
        mask = _index_set(bucket, m, f"{where}.buckets[{b}]")
        out.append(tuple(items_of(mask)))
    return tuple(out)


# ---------------------------------------------------------------------------
# valuations

def parse_valuation(rec: dict, m: int, where: str = "buyer") -> Valuation:
    kind = _field(rec, "type", where)
    if kind in ("additive", "unit_demand", "budget_additive"):
        vals = _rationals(_field(rec, "values", where), f"{where}.values")
        _count(vals, m, where)
        if kind == "additive":
            return Additive(vals)
        if kind == "unit_demand":
            return UnitDemand(vals)
        return BudgetAdditive(vals, _rational(_field(rec, "budget", where), f"{where}.budget"))
    if kind == "xos":
        raw = _field(rec, "clauses", where)
        if not isinstance(raw, list) or not raw:
            raise MarketError(f"{where}.clauses: expected a nonempty list")
        clauses = []
        for c, clause in enumerate(raw):
            vals = _rationals(clause, f"{where}.clauses[{c}]")
            _count(vals, m, f"{where}.clauses[{c}]")
            clauses.append(vals)
        return XOSExplicit(tuple(clauses))
    if kind == "single_minded":
        desired = _index_set(_field(rec, "desired", where), m, f"{where}.desired")
        return SingleMinded(m, desired, _rational(_field(rec, "value", where), f"{where}.value"))
    if kind == "symmetric":
        vals = _rationals(_field(rec, "by_size", where), f"{where}.by_size")
        _count(vals, m + 1, f"{where}.by_size")
        return SymmetricTable(vals)
    if kind == "h_plus_eps_f":
        eps = _rational(_field(rec, "eps", where), f"{where}.eps")
        return HPlusEpsilonF(eps, parse_valuation(_field(rec, "inner", where), m, f"{where}.inner"))
    if kind in ("bucket_xos", "bucket_unit"):
        buckets = _buckets(rec, m, where)
        equal = rec.get("equal_size", True)
        if not isinstance(equal, bool):
            raise MarketError(f"{where}.equal_size: expected true or false")
        if kind == "bucket_xos":
            v = BucketXOS(buckets, equal)
        else:
            k = rec.get("k")
            if k is not None and (isinstance(k, bool) or not isinstance(k, int)):
                raise MarketError(f"{where}.k: expected an integer")
            v = BucketUnit(buckets, k, equal)
        if v.m != m:
            raise MarketError(f"{where}: buckets cover {v.m} items, market has {m}")
        return v
    if kind == "table":
        # checked before touching the values so huge documents fail fast
        if m > DEMAND_CAP:
            raise CapExceeded(f"explicit table over {m} items exceeds cap {DEMAND_CAP}")
        vals = _rationals(_field(rec, "values", where), f"{where}.values")
        _count(vals, 1 << m, f"{where}.values")
        return ExplicitTable(vals)
    raise MarketError(f"{where}: unknown valuation type {kind!r}")


def _strs(values) -> list[str]:
    return [render_rational(x) for x in values]


def render_valuation(v: Valuation) -> dict:
    if isinstance(v, Additive):
        return {"type": "additive", "values": _strs(v.values)}
    if isinstance(v, UnitDemand):
        return {"type": "unit_demand", "values": _strs(v.values)}
    if isinstance(v, BudgetAdditive):
        return {"type": "budget_additive", "values": _strs(v.values), "budget": render_rational(v.budget)}
    if isinstance(v, XOSExplicit):
        return {"type": "xos", "clauses": [_strs(c) for c in v.clauses]}
    if isinstance(v, SingleMinded):
        return {"type": "single_minded", "desired": items_of(v.desired), "value": render_rational(v.worth)}
    if isinstance(v, SymmetricTable):
        return {"type": "symmetric", "by_size": _strs(v.by_size)}
    if isinstance(v, HPlusEpsilonF):
        return {"type": "h_plus_eps_f", "eps": render_rational(v.eps), "inner": render_valuation(v.inner)}
    if isinstance(v, (BucketXOS, BucketUnit)):
        rec: dict = {"type": "bucket_xos" if isinstance(v, BucketXOS) else "bucket_unit",
                     "buckets": [list(b) for b in v.buckets]}
        if isinstance(v, BucketUnit):
            rec["k"] = v.k
        if not v.equal_size:
            rec["equal_size"] = False
        return rec
    if isinstance(v, ExplicitTable):
        return {"type": "table", "values": _strs(v.values)}
    raise MarketError(f"no text form for {type(v).__name__}")


# ---------------------------------------------------------------------------
# markets

def market_from_doc(doc: Any) -> Market:
    if not isinstance(doc, dict):
        raise MarketError("market document must be a JSON object")
    schema = doc.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise MarketError(f"unsupported schema {schema!r}; expected {SCHEMA}")
    m = _field(doc, "m", "market")
    if isinstance(m, bool) or not isinstance(m, int) or m < 0:
        raise MarketError("market.m must be a nonnegative integer")
    buyers = _field(doc, "buyers", "market")
    if not isinstance(buyers, list) or not buyers:
        raise MarketError("market.buyers must be a nonempty list")
    return Market(m, tuple(parse_valuation(b, m, f"buyers[{i}]") for i, b in enumerate(buyers)))


def market_to_doc(market: Market) -> dict:
    return {"schema": SCHEMA, "m": market.m, "buyers": [render_valuation(v) for v in market.buyers]}


def parse_market(source: str | Path) -> Market:
    """Market from a file path or from the document text itself."""
    return market_from_doc(load_json(_read(source)))


def render_market(market: Market) -> str:
    return dump_json(market_to_doc(market))


# ---------------------------------------------------------------------------
# allocations and outcomes

def allocation_to_doc(alloc: Allocation) -> dict:
    return {"bundles": alloc.as_lists(), "unsold": items_of(alloc.unsold)}


def allocation_from_doc(doc: Any, market: Market) -> Allocation:
    bundles = _field(doc, "bundles", "allocation")
    if not isinstance(bundles, list) or len(bundles) != market.n:
        raise MarketError(f"allocation.bundles must list one bundle per buyer ({market.n})")
    masks = tuple(_index_set(b, market.m, f"allocation.bundles[{i}]") for i, b in enumerate(bundles))
    try:
        alloc = Allocation(market.m, masks)
    except ValueError as exc:
        raise MarketError(f"allocation: {exc}") from None
    if "unsold" in doc and _index_set(doc["unsold"], market.m, "allocation.unsold") != alloc.unsold:
        raise MarketError("allocation.unsold disagrees with the bundles")
    return alloc


def outcome_to_doc(alloc: Allocation, prices: Sequence[Fraction]) -> dict:
    return {"allocation": allocation_to_doc(alloc), "prices": _strs(prices)}


def parse_outcome(source: str | Path, market: Market,
                  need_prices: bool = True) -> tuple[Allocation, tuple[Fraction, ...] | None]:
    """Allocation and prices from an outcome file; ``{"bundles": ...}`` alone is also accepted."""
    doc = load_json(_read(source))
    if not isinstance(doc, dict):
        raise MarketError("outcome document must be a JSON object")
    alloc = allocation_from_doc(doc.get("allocation", doc), market)
    prices = None
    if "prices" in doc:
        prices = _rationals(doc["prices"], "prices")
        _count(prices, market.m, "prices")
        if any(p < 0 for p in prices):
            raise MarketError("prices must be nonnegative")
    elif need_prices:
        raise MarketError("outcome document has no prices")
    return alloc, prices


# ---------------------------------------------------------------------------
# reports

def decimal_text(q: Fraction, digits: int = 12) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def encode(obj: Any, approx: dict[str, str] | None = None, path: str = "") -> Any:
    """JSON-ready copy of ``obj`` with every Fraction as "p/q".

    When ``approx`` is given, each rational's decimal rendering is recorded
    there under its slash-separated path.
    """
    if isinstance(obj, Fraction):
        if approx is not None and obj.denominator != 1:
            approx[path] = decimal_text(obj)
        return render_rational(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        raise TypeError(f"float at {path or '/'} in a report")
    if isinstance(obj, dict):
        return {str(k): encode(v, approx, f"{path}/{k}") for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v, approx, f"{path}/{k}") for k, v in enumerate(obj)]
    raise TypeError(f"cannot encode {type(obj).__name__} at {path or '/'}")


def render_report(command: Sequence[str], results: Any, approx: bool = False,
                  timing: float | None = None) -> str:
    notes: dict[str, str] | None = {} if approx else None
    doc: dict[str, Any] = {"command": list(command), "results": encode(results, notes, "/results"), "exact": True}
    if approx:
        doc["approx_display_only"] = notes
    if timing is not None:
        doc["timing_seconds"] = decimal_text(Fraction(timing).limit_denominator(10 ** 6), 6)
    return dump_json(doc)
