"""Post-hoc privacy audit over a run's :class:`~htbandits.mechanisms.PrivacyLedger`.

The audit recomputes, independently of the policies, the Laplace scale each
draw site mandates and compares it exactly against what the run recorded.  It
also checks that every inserted value respected its magnitude bound, that
per-arm mechanisms received only their own arm's data (the precondition for
parallel composition), and that elimination runs drew exactly as much noise as
their epoch ledger implies.  Audit a finished run; a run stopped mid-epoch can
legitimately trail its epoch ledger.
"""

import math
from dataclasses import dataclass, field

from .mechanisms import (
    LOCAL_REWARD_SITE,
    SE_RELEASE_SITE,
    TREE_SITE,
    PrivacyLedger,
)

__all__ = ["AuditFinding", "AuditReport", "audit_run"]


@dataclass(frozen=True)
class AuditFinding:
    """One violation: the offending site/check and the record index."""

    site: str
    index: int
    message: str


@dataclass
class AuditReport:
    """Audit outcome; ``ok`` means no findings."""

    findings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, site: str, index: int, message: str) -> None:
        self.findings.append(AuditFinding(site=site, index=index, message=message))


def _mandated_scale(site: str, context: dict) -> float:
    # These expressions must match, operation for operation, the ones the
    # policies use, so clean runs compare bit-equal.
    if site == TREE_SITE:
        return 2.0 * context["bound"] / (context["eps"] / math.log(context["horizon"]))
    if site == SE_RELEASE_SITE:
        return 2.0 * context["truncation"] / (context["pulls"] * context["eps"])
    if site == LOCAL_REWARD_SITE:
        return 2.0 * context["truncation"] / context["eps"]
    raise KeyError(site)


def audit_run(ledger: PrivacyLedger) -> AuditReport:
    """Check a recorded run against the privacy accounting rules.

    Returns an :class:`AuditReport`; each finding names the offending site or
    check and the index of the violating record.
    """
    report = AuditReport()

    for i, draw in enumerate(ledger.noise_draws):
        try:
            mandated = _mandated_scale(draw.site, draw.context)
        except KeyError:
            report.add(draw.site, i, f"unknown draw site {draw.site!r}")
            continue
        if draw.scale != mandated:
            report.add(
                draw.site,
                i,
                f"scale {draw.scale!r} differs from mandated {mandated!r}",
            )

    num_mechs = len(ledger.mechanisms)
    for i, ins in enumerate(ledger.insertions):
        if not 0 <= ins.mechanism < num_mechs:
            report.add("insertion", i, f"unregistered mechanism {ins.mechanism}")
            continue
        if abs(ins.value) > ins.bound:
            report.add(
                "insertion",
                i,
                f"|value| = {abs(ins.value)!r} exceeds bound {ins.bound!r}",
            )
        registered = ledger.mechanisms[ins.mechanism].owner
        if ins.owner != registered:
            report.add(
                "disjointness",
                i,
                f"mechanism {ins.mechanism} (arm {registered}) received data of arm {ins.owner}",
            )

    seen_owners: dict = {}
    for m, mech in enumerate(ledger.mechanisms):
        if mech.owner is None:
            continue
        key = (mech.kind, mech.owner)
        if key in seen_owners:
            report.add(
                "disjointness",
                m,
                f"arm {mech.owner} feeds two {mech.kind!r} mechanisms "
                f"({seen_owners[key]} and {m})",
            )
        else:
            seen_owners[key] = m

    central_draws = sum(1 for d in ledger.noise_draws if d.site == SE_RELEASE_SITE)
    local_draws = sum(1 for d in ledger.noise_draws if d.site == LOCAL_REWARD_SITE)
    expected_central = sum(
        e.num_viable for e in ledger.epochs if e.kind == "central_se" and e.completed
    )
    expected_local = sum(
        e.num_viable * e.pulls_per_arm
        for e in ledger.epochs
        if e.kind == "local_se" and e.completed
    )
    open_local = sum(
        e.num_viable * e.pulls_per_arm
        for e in ledger.epochs
        if e.kind == "local_se" and not e.completed
    )
    has_central = any(e.kind == "central_se" for e in ledger.epochs) or central_draws > 0
    has_local = any(e.kind == "local_se" for e in ledger.epochs) or local_draws > 0
    if has_central and central_draws != expected_central:
        report.add(
            SE_RELEASE_SITE,
            -1,
            f"{central_draws} release draws, epoch ledger implies {expected_central}",
        )
    if has_local and not (
        expected_local <= local_draws <= expected_local + open_local
    ):
        report.add(
            LOCAL_REWARD_SITE,
            -1,
            f"{local_draws} per-reward draws, epoch ledger implies "
            f"{expected_local} (+ at most {open_local} in flight)",
        )
    return report
