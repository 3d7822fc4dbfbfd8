"""Measure-bounded word-set certificates and their JSON round trip.

A certificate packages one enumerated test component: the words (or grid
samples) it has produced, the exact measure of the open set they generate,
and the bound the construction promises.  A certificate whose measure
exceeds its bound indicates a construction bug, never a legitimate run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable

from .bitseq import Word
from .dyadic import Dyadic
from .errors import BoundViolationError
from .measure import is_prefix_free, measure_open, sorted_words

KINDS = ("kurtz-stage", "schnorr-error", "ml-Cr", "ml-Gm", "ml-refined")


@dataclass
class TestCertificate:
    __test__ = False  # not a pytest class, despite the name

    kind: str
    parameters: dict[str, Any]
    words: tuple  # Words (space == "bits") or ArraySamples (space == "grid")
    exact_measure: Dyadic
    required_bound: Dyadic
    stage_budget: int
    space: str = "bits"
    escape_level: int | None = None

    @property
    def passes(self) -> bool:
        return self.exact_measure <= self.required_bound

    def to_json_dict(self) -> dict:
        if self.space == "bits":
            words = [str(w) for w in self.words]
        else:
            words = [{"size": a.size, "bits": a.bit_string()} for a in self.words]
        return {
            "kind": self.kind,
            "space": self.space,
            "parameters": dict(sorted(self.parameters.items())),
            "words": words,
            "exact_measure": str(self.exact_measure),
            "required_bound": str(self.required_bound),
            "stage_budget": self.stage_budget,
            "escape_level": self.escape_level,
            "pass": self.passes,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "TestCertificate":
        space = data.get("space", "bits")
        if space == "bits":
            words = tuple(Word.from_string(w) for w in data["words"])
        else:
            from .multidim import ArraySample

            dim = int(data["parameters"]["dimension"])
            words = tuple(
                ArraySample.from_bit_string(dim, int(w["size"]), w["bits"])
                for w in data["words"]
            )
        return cls(
            kind=data["kind"],
            parameters=dict(data["parameters"]),
            words=words,
            exact_measure=Dyadic.from_string(data["exact_measure"]),
            required_bound=Dyadic.from_string(data["required_bound"]),
            stage_budget=int(data["stage_budget"]),
            space=space,
            escape_level=data.get("escape_level"),
        )


def new_certificate(
    kind: str,
    parameters: dict[str, Any],
    words: Iterable,
    exact_measure: Dyadic,
    required_bound: Dyadic,
    stage_budget: int,
    space: str = "bits",
    escape_level: int | None = None,
) -> TestCertificate:
    """Build a certificate, refusing to emit one that violates its bound."""
    if kind not in KINDS:
        raise ValueError(f"unknown certificate kind: {kind!r}")
    if space == "bits":
        words = sorted_words(words)
    else:
        words = tuple(sorted(words, key=lambda a: (a.size, a.bits)))
    cert = TestCertificate(
        kind, parameters, words, exact_measure, required_bound, stage_budget,
        space=space, escape_level=escape_level,
    )
    if not cert.passes:
        raise BoundViolationError(
            f"{kind} certificate has measure {exact_measure} > bound {required_bound} "
            f"(parameters {parameters})"
        )
    return cert


def verify_certificate(cert: TestCertificate) -> list[str]:
    """Re-check a certificate from its own words; returns the list of problems."""
    problems: list[str] = []
    if cert.space == "bits":
        recomputed = measure_open(cert.words)
        if not is_prefix_free(cert.words):
            problems.append("word set is not prefix-free")
        if cert.kind.startswith("ml-") and any(
            w.length > cert.stage_budget for w in cert.words
        ):
            problems.append("a word is longer than the stage budget")
    else:
        from .multidim import array_measure_open, arrays_prefix_free

        recomputed = array_measure_open(cert.words)
        if not arrays_prefix_free(cert.words):
            problems.append("sample set is not prefix-free under restriction")
    if recomputed != cert.exact_measure:
        problems.append(
            f"stated measure {cert.exact_measure} differs from recomputed {recomputed}"
        )
    if recomputed > cert.required_bound:
        problems.append(
            f"measure {recomputed} violates required bound {cert.required_bound}"
        )
    return problems


def certificates_to_json(certs: Iterable[TestCertificate]) -> str:
    payload = {"certificates": [c.to_json_dict() for c in certs]}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


_CERT_KEYS = ("certificates", "g_certificates", "refined_certificates")


def certificates_from_json(text: str) -> list[TestCertificate]:
    data = json.loads(text)
    if isinstance(data, dict):
        items = [c for key in _CERT_KEYS for c in data.get(key, [])]
        if not items:
            items = [data]
    else:
        items = data
    return [TestCertificate.from_json_dict(item) for item in items]
