"""Network description files: JSON in, JSON out.

A network file names the links, lists interference edges, and declares the
fading structure (explicit ON/OFF states, i.i.d. with a parameter, or
multi-state value vectors). Probabilities and rates are written as exact
"num/den" or decimal strings so round-tripping never drifts. Optional
sections carry default arrival rates and an attainable-vector decomposition
for adversarial simulations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import FlpfError, LimitExceeded, NetworkFileError
from .fading import FadingStructure, from_explicit, from_iid_bernoulli
from .interference import InterferenceGraph, validate_graph


def parse_rational(value, field: str) -> Fraction:
    try:
        if isinstance(value, float):
            raise NetworkFileError(
                f"{value!r} is a float; write rationals as strings", field
            )
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise NetworkFileError(f"bad rational {value!r} ({exc})", field) from None


@dataclass(frozen=True)
class NetworkFile:
    graph: InterferenceGraph
    fading: FadingStructure
    rates: dict[str, Fraction] | None
    decomposition: dict | None
    fading_spec: dict


def parse_network(source) -> NetworkFile:
    """Parse a network file from a path, JSON string, or dict."""
    if isinstance(source, dict):
        doc = source
    else:
        text = source
        if not str(source).lstrip().startswith("{"):
            with open(source) as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise NetworkFileError(f"not valid JSON: {exc}") from None

    labels = doc.get("links")
    if not isinstance(labels, list) or not labels or not all(
        isinstance(s, str) for s in labels
    ):
        raise NetworkFileError("need a nonempty list of string labels", "links")
    if len(set(labels)) != len(labels):
        raise NetworkFileError("labels must be unique", "links")

    edges = doc.get("interference", [])
    pairs = []
    for n, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise NetworkFileError(f"edge #{n} is not a pair", "interference")
        u, v = e
        if u not in labels or v not in labels:
            raise NetworkFileError(f"edge #{n} names unknown link", "interference")
        pairs.append((u, v))
    try:
        graph = InterferenceGraph.from_edges(labels, pairs)
        validate_graph(graph)
    except FlpfError as exc:
        raise NetworkFileError(str(exc), "interference") from None

    fading_spec = doc.get("fading")
    if not isinstance(fading_spec, dict) or "mode" not in fading_spec:
        raise NetworkFileError("need an object with a 'mode'", "fading")
    fading = _parse_fading(graph, fading_spec)

    rates = None
    if "rates" in doc:
        raw = doc["rates"]
        if not isinstance(raw, dict) or set(raw) != set(labels):
            raise NetworkFileError("must give one rate per link", "rates")
        rates = {
            lab: parse_rational(raw[lab], f"rates.{lab}") for lab in labels
        }
        if any(v < 0 for v in rates.values()):
            raise NetworkFileError("rates must be nonnegative", "rates")

    decomposition = doc.get("decomposition")
    if decomposition is not None:
        decomposition = _parse_decomposition(labels, decomposition)

    return NetworkFile(graph, fading, rates, decomposition, fading_spec)


def _parse_fading(graph: InterferenceGraph, spec: dict) -> FadingStructure:
    mode = spec["mode"]
    try:
        if mode == "iid":
            if "p" not in spec:
                raise NetworkFileError("iid mode needs 'p'", "fading.p")
            return from_iid_bernoulli(graph, parse_rational(spec["p"], "fading.p"))
        if mode in ("explicit", "multistate"):
            entries = spec.get("states")
            if not isinstance(entries, list) or not entries:
                raise NetworkFileError("need a list of states", "fading.states")
            states, probs = [], []
            for n, entry in enumerate(entries):
                field = f"fading.states[{n}]"
                if mode == "explicit":
                    pat = entry.get("state")
                    if (
                        not isinstance(pat, str)
                        or len(pat) != graph.num_links
                        or set(pat) - {"0", "1"}
                    ):
                        raise NetworkFileError(
                            f"state must be a {graph.num_links}-char 0/1 pattern",
                            field,
                        )
                    states.append(pat)
                else:
                    vals = entry.get("values")
                    if not isinstance(vals, list) or len(vals) != graph.num_links:
                        raise NetworkFileError(
                            f"need {graph.num_links} channel values", field
                        )
                    states.append(
                        tuple(parse_rational(v, field) for v in vals)
                    )
                probs.append(parse_rational(entry.get("prob"), f"{field}.prob"))
            return from_explicit(graph, states, probs)
    except (NetworkFileError, LimitExceeded):
        raise
    except FlpfError as exc:
        raise NetworkFileError(str(exc), "fading") from None
    raise NetworkFileError(f"unknown mode {mode!r}", "fading.mode")


def _parse_decomposition(labels, spec: dict) -> dict:
    if not isinstance(spec, dict):
        raise NetworkFileError("must be an object", "decomposition")
    out = {}
    subset = spec.get("subset", labels)
    if not isinstance(subset, list) or not subset or set(subset) - set(labels):
        raise NetworkFileError("subset names unknown links", "decomposition.subset")
    out["subset"] = subset
    weights = spec.get("weights")
    if not isinstance(weights, dict) or not weights:
        raise NetworkFileError(
            "need per-state weight vectors", "decomposition.weights"
        )
    out["weights"] = {
        pat: [
            parse_rational(v, f"decomposition.weights.{pat}") for v in vec
        ]
        for pat, vec in weights.items()
    }
    if "target" in spec:
        tgt = spec["target"]
        if not isinstance(tgt, dict) or set(tgt) - set(labels):
            raise NetworkFileError("target names unknown links", "decomposition.target")
        out["target"] = {
            lab: parse_rational(v, f"decomposition.target.{lab}")
            for lab, v in tgt.items()
        }
    for key, default in (("eps", Fraction(1, 50)), ("delta", Fraction(1, 1000))):
        out[key] = (
            parse_rational(spec[key], f"decomposition.{key}")
            if key in spec
            else default
        )
    return out


def _fmt(x: Fraction) -> str:
    return str(x)


def serialize_network(nf: NetworkFile) -> dict:
    """Canonical JSON form; parsing it back gives equal graph and fading."""
    g = nf.graph
    edges = sorted(
        [g.links[i].label, g.links[j].label]
        for i, s in enumerate(g.interference)
        for j in s
        if i < j
    )
    doc = {
        "links": [l.label for l in g.links],
        "interference": edges,
    }
    spec = nf.fading_spec
    if spec["mode"] == "iid":
        doc["fading"] = {"mode": "iid", "p": str(parse_rational(spec["p"], "p"))}
    elif nf.fading.mode == "onoff":
        doc["fading"] = {
            "mode": "explicit",
            "states": [
                {"state": s.pattern(), "prob": _fmt(p)}
                for s, p in nf.fading.states
            ],
        }
    else:
        doc["fading"] = {
            "mode": "multistate",
            "states": [
                {"values": [str(v) for v in s.values], "prob": _fmt(p)}
                for s, p in nf.fading.states
            ],
        }
    if nf.rates is not None:
        doc["rates"] = {lab: _fmt(v) for lab, v in nf.rates.items()}
    if nf.decomposition is not None:
        d = nf.decomposition
        doc["decomposition"] = {
            "subset": d["subset"],
            "weights": {
                pat: [_fmt(v) for v in vec] for pat, vec in d["weights"].items()
            },
            "eps": _fmt(d["eps"]),
            "delta": _fmt(d["delta"]),
        }
        if "target" in d:
            doc["decomposition"]["target"] = {
                lab: _fmt(v) for lab, v in d["target"].items()
            }
    return doc
