"""Built-in catalog of syllogism forms with machine-verified validity labels."""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

from .formulas import Atom, Box, Diamond, Formula, Implies, MetaVar, Not, Or, substitute
from .kripke import FrameClass, Mode, Sequent
from .tableau import decide

YES = "Yes"
NO = "No"

PHI = MetaVar("phi")
PSI = MetaVar("psi")
P = Atom("p")
Q = Atom("q")


class Modality(enum.Enum):
    NONE = "propositional"
    NECESSITY = "must"
    POSSIBILITY = "may"

    def wrap(self, f: Formula) -> Formula:
        """Apply this modality to a formula (identity for the plain case)."""
        if self is Modality.NECESSITY:
            return Box(f)
        if self is Modality.POSSIBILITY:
            return Diamond(f)
        return f


class ArgForm(enum.Enum):
    DISJ_L = "disj_l"
    DISJ_R = "disj_r"
    MODUS_PONENS_L = "modus_ponens_l"
    MODUS_TOLLENS_R = "modus_tollens_r"
    NEC_INTRO = "nec_intro"
    BASE = "base"
    THEOREM = "theorem"
    SPURIOUS = "spurious"

    @property
    def merged(self) -> str:
        """Three-level grouping used by the regression analyses."""
        if self in (ArgForm.DISJ_L, ArgForm.DISJ_R):
            return "disjunctive"
        if self is ArgForm.MODUS_PONENS_L:
            return "modus_ponens"
        if self is ArgForm.MODUS_TOLLENS_R:
            return "modus_tollens"
        return self.value


class Family(enum.Enum):
    MAIN24 = "main24"
    NECESSITATION = "necessitation"
    DISTRIBUTION = "distribution"


@dataclass(frozen=True)
class CatalogEntry:
    """One logical form: metavariable templates plus their instantiation."""

    entry_id: str
    family: Family
    modality: Modality
    arg_form: ArgForm
    valid_form: bool  # entailment (True) vs fallacy/spurious variant (False)
    premises: tuple[Formula, ...]  # templates over phi/psi
    conclusion: Formula
    phi: Formula  # concrete substitution for phi
    psi: Formula
    mode: Mode
    frames: FrameClass
    label: str  # machine-verified ground truth, "Yes" | "No"
    claimed_label: str  # what the form is conventionally claimed to be

    def sequent(self) -> Sequent:
        return Sequent(
            tuple(substitute(p, self.phi, self.psi) for p in self.premises),
            substitute(self.conclusion, self.phi, self.psi),
            self.mode,
            self.frames,
        )


_MAIN_SHAPES: list[tuple[ArgForm, bool, tuple[Formula, ...], Formula]] = [
    (ArgForm.DISJ_L, True, (Or(PHI, PSI), Not(PHI)), PSI),
    (ArgForm.DISJ_R, True, (Or(PHI, PSI), Not(PSI)), PHI),
    (ArgForm.MODUS_PONENS_L, True, (Implies(Not(PHI), PSI), Not(PHI)), PSI),
    (ArgForm.MODUS_TOLLENS_R, True, (Implies(Not(PHI), PSI), Not(PSI)), PHI),
    (ArgForm.DISJ_L, False, (Or(PHI, PSI), PSI), Not(PHI)),
    (ArgForm.DISJ_R, False, (Or(PHI, PSI), PHI), Not(PSI)),
    (ArgForm.MODUS_PONENS_L, False, (Implies(Not(PHI), PSI), PSI), Not(PHI)),
    (ArgForm.MODUS_TOLLENS_R, False, (Implies(Not(PHI), PSI), PHI), Not(PSI)),
]

# (modality, arg_form, premises, conclusion, verified label, claimed label)
_DISTRIBUTION_ROWS: list[tuple[Modality, ArgForm, tuple[Formula, ...], Formula, str, str]] = [
    (Modality.NONE, ArgForm.BASE, (Or(PHI, PSI), Not(PHI)), PSI, YES, YES),
    (Modality.NECESSITY, ArgForm.BASE, (Or(Box(PHI), Box(PSI)), Not(Box(PHI))), Box(PSI), YES, YES),
    (Modality.NECESSITY, ArgForm.THEOREM, (Box(Or(PHI, PSI)), Box(Not(PHI))), Box(PSI), YES, YES),
    (Modality.NECESSITY, ArgForm.SPURIOUS, (Box(Or(PHI, PSI)), Not(Box(PHI))), Box(PSI), NO, NO),
    (Modality.POSSIBILITY, ArgForm.BASE, (Or(Diamond(PHI), Diamond(PSI)), Not(Diamond(PHI))), Diamond(PSI), YES, YES),
    # conventionally cited as a theorem (possibility distributing over
    # disjunction), but Kripke semantics refutes it: the two premises may be
    # witnessed by different successors; the verified label wins
    (Modality.POSSIBILITY, ArgForm.THEOREM, (Diamond(Or(PHI, PSI)), Diamond(Not(PHI))), Diamond(PSI), NO, YES),
    (Modality.POSSIBILITY, ArgForm.SPURIOUS, (Diamond(Or(PHI, PSI)), Not(Diamond(PHI))), Diamond(PSI), YES, YES),
]


@functools.lru_cache(maxsize=1)
def builtin_catalog() -> tuple[CatalogEntry, ...]:
    """All 34 forms: 24 main, 3 necessitation variants, 7 distribution rows."""
    entries: list[CatalogEntry] = []
    for valid_block in (True, False):
        for modality in Modality:
            for arg_form, valid_form, premises, conclusion in _MAIN_SHAPES:
                if valid_form is not valid_block:
                    continue
                tag = "entail" if valid_form else "fallacy"
                entries.append(
                    CatalogEntry(
                        entry_id=f"{modality.value}-{arg_form.value}-{tag}",
                        family=Family.MAIN24,
                        modality=modality,
                        arg_form=arg_form,
                        valid_form=valid_form,
                        premises=premises,
                        conclusion=conclusion,
                        phi=modality.wrap(P),
                        psi=modality.wrap(Q),
                        mode=Mode.LOCAL,
                        frames=FrameClass.REFLEXIVE,
                        label=YES if valid_form else NO,
                        claimed_label=YES if valid_form else NO,
                    )
                )
    for modality in (Modality.NECESSITY, Modality.POSSIBILITY, Modality.NONE):
        entries.append(
            CatalogEntry(
                entry_id=f"nec-{modality.value}",
                family=Family.NECESSITATION,
                modality=modality,
                arg_form=ArgForm.NEC_INTRO,
                valid_form=True,
                premises=(PHI,),
                conclusion=modality.wrap(PHI),
                phi=P,
                psi=Q,
                mode=Mode.GLOBAL,
                frames=FrameClass.REFLEXIVE,
                label=YES,
                claimed_label=YES,
            )
        )
    for modality, arg_form, premises, conclusion, label, claimed in _DISTRIBUTION_ROWS:
        entries.append(
            CatalogEntry(
                entry_id=f"dist-{modality.value}-{arg_form.value}",
                family=Family.DISTRIBUTION,
                modality=modality,
                arg_form=arg_form,
                valid_form=label == YES,
                premises=premises,
                conclusion=conclusion,
                phi=P,
                psi=Q,
                mode=Mode.LOCAL,
                frames=FrameClass.REFLEXIVE,
                label=label,
                claimed_label=claimed,
            )
        )
    return tuple(entries)


def entries_for_families(names: list[str]) -> tuple[CatalogEntry, ...]:
    wanted = {Family(name) for name in names}
    return tuple(e for e in builtin_catalog() if e.family in wanted)


@dataclass(frozen=True)
class AuditRow:
    entry_id: str
    family: str
    label: str
    claimed_label: str
    verdict: str  # prover's answer, "Yes" | "No"
    label_ok: bool  # stored label matches the prover
    diverges: bool  # verified label contradicts the conventional claim
    stable: bool | None  # main forms only: same verdict across mode/frame combos


_STABILITY_COMBOS = (
    (Mode.LOCAL, FrameClass.K),
    (Mode.LOCAL, FrameClass.REFLEXIVE),
    (Mode.GLOBAL, FrameClass.REFLEXIVE),
)


def audit_catalog(entries: tuple[CatalogEntry, ...] | None = None) -> list[AuditRow]:
    """Re-prove every catalog label; main forms also get a stability check."""
    rows = []
    for entry in entries or builtin_catalog():
        base = entry.sequent()
        verdict = decide(base)
        stable: bool | None = None
        if entry.family is Family.MAIN24:
            verdicts = {
                decide(Sequent(base.premises, base.conclusion, mode, frames)).valid
                for mode, frames in _STABILITY_COMBOS
            }
            stable = len(verdicts) == 1
        rows.append(
            AuditRow(
                entry_id=entry.entry_id,
                family=entry.family.value,
                label=entry.label,
                claimed_label=entry.claimed_label,
                verdict=YES if verdict.valid else NO,
                label_ok=(YES if verdict.valid else NO) == entry.label,
                diverges=entry.label != entry.claimed_label,
                stable=stable,
            )
        )
    return rows


def format_audit(rows: list[AuditRow]) -> str:
    lines = [f"{'form':34} {'family':13} {'label':5} {'claimed':7} {'verdict':7} status"]
    for r in rows:
        status = "ok" if r.label_ok else "LABEL MISMATCH"
        if r.diverges:
            status += " DIVERGES-FROM-CLAIM"
        if r.stable is False:
            status += " UNSTABLE"
        lines.append(
            f"{r.entry_id:34} {r.family:13} {r.label:5} {r.claimed_label:7} {r.verdict:7} {status}"
        )
    n_ok = sum(r.label_ok for r in rows)
    n_div = sum(r.diverges for r in rows)
    lines.append(
        f"{n_ok}/{len(rows)} labels verified; {n_div} documented divergence"
        f"{'s' if n_div != 1 else ''} from the conventional claims"
    )
    return "\n".join(lines)
