"""Three-valued verdicts with certificates.

Oracles never guess: a verdict is CertifiedIn / CertifiedOut only when backed
by a certificate that stays valid at every larger horizon, and Undecided
otherwise, carrying whatever trace failed to decide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

IN = "in"
OUT = "out"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class Verdict:
    status: str
    certificate: Optional[str] = None
    witness: Optional[dict] = None
    horizon: Optional[int] = None

    @property
    def decided(self) -> bool:
        return self.status in (IN, OUT)

    def to_json(self) -> dict:
        d = {"status": self.status}
        if self.certificate:
            d["certificate"] = self.certificate
        if self.witness is not None:
            d["witness"] = self.witness
        if self.horizon is not None:
            d["horizon"] = self.horizon
        return d


def certified_in(certificate: str, witness: Optional[dict] = None) -> Verdict:
    return Verdict(IN, certificate, witness)


def certified_out(certificate: str, witness: Optional[dict] = None) -> Verdict:
    return Verdict(OUT, certificate, witness)


def undecided(reason: str, horizon: Optional[int] = None,
              witness: Optional[dict] = None) -> Verdict:
    return Verdict(UNDECIDED, reason, witness, horizon)
