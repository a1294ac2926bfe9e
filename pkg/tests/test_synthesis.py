"""Byte-level checks on question wording, lexicon handling, and dataset files."""

import json

import pytest

from modalbench.catalog import Family, Modality, builtin_catalog
from modalbench.dataset import (
    DatasetError,
    generate_dataset,
    meta_path_for,
    read_items,
    read_meta,
)
from modalbench.formulas import And, Atom, Box, Diamond, Implies, Not, Or
from modalbench.lexicon import (
    Interpretation,
    Lexicon,
    LexiconError,
    make_nonsense_lexicon,
    natural_lexicon,
    sample_interpretations,
)
from modalbench.realize import (
    RealizationError,
    build_prompt,
    clause,
    realize_question,
    realize_statement,
    sentence,
)

P, Q = Atom("p"), Atom("q")

DISJ0 = "Jane is watching a show or John is reading a book."
COND0 = "If Jane isn't watching a show, then John is reading a book."
DISJ_B = "It's certain that Jane is watching a show or it's certain that John is reading a book."
COND_B = "If it's uncertain whether Jane is watching a show, then it's certain that John is reading a book."
DISJ_D = "It's possible that Jane is watching a show or it's possible that John is reading a book."
COND_D = "If it's impossible that Jane is watching a show, then it's possible that John is reading a book."

# (entry_id, first premise, second premise, question clause)
MAIN24_GOLDEN = [
    ("propositional-disj_l-entail", DISJ0, "Jane isn't watching a show.", "John is reading a book"),
    ("propositional-disj_r-entail", DISJ0, "John isn't reading a book.", "Jane is watching a show"),
    ("propositional-modus_ponens_l-entail", COND0, "Jane isn't watching a show.", "John is reading a book"),
    ("propositional-modus_tollens_r-entail", COND0, "John isn't reading a book.", "Jane is watching a show"),
    ("propositional-disj_l-fallacy", DISJ0, "John is reading a book.", "Jane isn't watching a show"),
    ("propositional-disj_r-fallacy", DISJ0, "Jane is watching a show.", "John isn't reading a book"),
    ("propositional-modus_ponens_l-fallacy", COND0, "John is reading a book.", "Jane isn't watching a show"),
    ("propositional-modus_tollens_r-fallacy", COND0, "Jane is watching a show.", "John isn't reading a book"),
    ("must-disj_l-entail", DISJ_B, "It's uncertain whether Jane is watching a show.", "it's certain that John is reading a book"),
    ("must-disj_r-entail", DISJ_B, "It's uncertain whether John is reading a book.", "it's certain that Jane is watching a show"),
    ("must-modus_ponens_l-entail", COND_B, "It's uncertain whether Jane is watching a show.", "it's certain that John is reading a book"),
    ("must-modus_tollens_r-entail", COND_B, "It's uncertain whether John is reading a book.", "it's certain that Jane is watching a show"),
    ("must-disj_l-fallacy", DISJ_B, "It's certain that John is reading a book.", "it's uncertain whether Jane is watching a show"),
    ("must-disj_r-fallacy", DISJ_B, "It's certain that Jane is watching a show.", "it's uncertain whether John is reading a book"),
    ("must-modus_ponens_l-fallacy", COND_B, "It's certain that John is reading a book.", "it's uncertain whether Jane is watching a show"),
    ("must-modus_tollens_r-fallacy", COND_B, "It's certain that Jane is watching a show.", "it's uncertain whether John is reading a book"),
    ("may-disj_l-entail", DISJ_D, "It's impossible that Jane is watching a show.", "it's possible that John is reading a book"),
    ("may-disj_r-entail", DISJ_D, "It's impossible that John is reading a book.", "it's possible that Jane is watching a show"),
    ("may-modus_ponens_l-entail", COND_D, "It's impossible that Jane is watching a show.", "it's possible that John is reading a book"),
    ("may-modus_tollens_r-entail", COND_D, "It's impossible that John is reading a book.", "it's possible that Jane is watching a show"),
    ("may-disj_l-fallacy", DISJ_D, "It's possible that John is reading a book.", "it's impossible that Jane is watching a show"),
    ("may-disj_r-fallacy", DISJ_D, "It's possible that Jane is watching a show.", "it's impossible that John is reading a book"),
    ("may-modus_ponens_l-fallacy", COND_D, "It's possible that John is reading a book.", "it's impossible that Jane is watching a show"),
    ("may-modus_tollens_r-fallacy", COND_D, "It's possible that Jane is watching a show.", "it's impossible that John is reading a book"),
]


@pytest.fixture(scope="module")
def realized(jane_john):
    return {
        e.entry_id: realize_question(e, jane_john)
        for e in builtin_catalog()
    }


@pytest.mark.parametrize("entry_id,p1,p2,question", MAIN24_GOLDEN, ids=[r[0] for r in MAIN24_GOLDEN])
def test_main24_wording(realized, entry_id, p1, p2, question):
    item = realized[entry_id]
    assert item.statements == [p1, p2]
    assert item.question == (
        f"Question: Based on these statements, can we infer that {question}?"
    )


def test_full_prompt_layout(realized):
    assert realized["propositional-disj_l-entail"].prompt == (
        "Consider the following statements:\n"
        "Jane is watching a show or John is reading a book.\n"
        "Jane isn't watching a show.\n"
        "Question: Based on these statements, can we infer that John is reading a book?\n"
        "Answer:"
    )


def test_prompts_have_no_trailing_newline(realized):
    for item in realized.values():
        assert not item.prompt.endswith("\n")
        assert item.prompt.endswith("Answer:")


def test_necessitation_prompts(realized):
    assert realized["nec-must"].prompt == (
        "Consider the following statements:\n"
        "Jane is watching a show.\n"
        "Question: Based on these statements, can we infer that "
        "it's certain that Jane is watching a show?\n"
        "Answer:"
    )
    assert realized["nec-may"].statements == ["Jane is watching a show."]
    assert realized["nec-may"].question.endswith(
        "can we infer that it's possible that Jane is watching a show?"
    )
    assert realized["nec-propositional"].question.endswith(
        "can we infer that Jane is watching a show?"
    )


DIST_GOLDEN = [
    ("dist-propositional-base", [DISJ0, "Jane isn't watching a show."], "John is reading a book"),
    ("dist-must-base", [DISJ_B, "It's uncertain whether Jane is watching a show."], "it's certain that John is reading a book"),
    (
        "dist-must-theorem",
        [
            "It's certain that if Jane is not watching a show, then John is reading a book.",
            "It's certain that Jane is not watching a show.",
        ],
        "it's certain that John is reading a book",
    ),
    (
        "dist-must-spurious",
        [
            "It's certain that if Jane is not watching a show, then John is reading a book.",
            "It's uncertain whether Jane is watching a show.",
        ],
        "it's certain that John is reading a book",
    ),
    ("dist-may-base", [DISJ_D, "It's impossible that Jane is watching a show."], "it's possible that John is reading a book"),
    (
        "dist-may-theorem",
        [
            "It's possible that if Jane is not watching a show, then John is reading a book.",
            "It's possible that Jane is not watching a show.",
        ],
        "it's possible that John is reading a book",
    ),
    (
        "dist-may-spurious",
        [
            "It's possible that if Jane is not watching a show, then John is reading a book.",
            "It's impossible that Jane is watching a show.",
        ],
        "it's possible that John is reading a book",
    ),
]


@pytest.mark.parametrize("entry_id,statements,question", DIST_GOLDEN, ids=[r[0] for r in DIST_GOLDEN])
def test_distribution_wording(realized, entry_id, statements, question):
    item = realized[entry_id]
    assert item.statements == statements
    assert item.question.endswith(f"can we infer that {question}?")


def test_item_metadata(realized):
    item = realized["must-disj_l-entail"]
    assert item.item_id == "must-disj_l-entail.0000"
    assert item.form_id == "must-disj_l-entail"
    assert item.family == "main24"
    assert item.modality == "must"
    assert item.arg_form == "disjunctive"  # merged three-level coding
    assert item.ground_truth == "Yes"
    assert item.lexicon_kind == "natural"
    assert item.subjects == ("Jane", "John")
    assert item.verb_phrases == ("watching a show", "reading a book")
    nec = realized["nec-may"]
    assert nec.arg_form == "nec_intro"
    theorem = realized["dist-may-theorem"]
    assert theorem.ground_truth == "No"


# -- statement templates ------------------------------------------------------


def test_statement_templates():
    cases = [
        (Modality.NONE, False, "Ada is baking bread"),
        (Modality.NONE, True, "Ada isn't baking bread"),
        (Modality.NECESSITY, False, "it's certain that Ada is baking bread"),
        (Modality.NECESSITY, True, "it's uncertain whether Ada is baking bread"),
        (Modality.POSSIBILITY, False, "it's possible that Ada is baking bread"),
        (Modality.POSSIBILITY, True, "it's impossible that Ada is baking bread"),
    ]
    for modality, negated, expected in cases:
        assert realize_statement(modality, negated, "Ada", "baking bread") == expected


def test_negation_inside_modal_uses_is_not(jane_john):
    assert clause(Box(Not(P)), jane_john) == "it's certain that Jane is not watching a show"
    assert clause(Diamond(Not(P)), jane_john) == "it's possible that Jane is not watching a show"
    # negation outside the modal reads as uncertainty/impossibility instead
    assert clause(Not(Box(P)), jane_john) == "it's uncertain whether Jane is watching a show"
    assert clause(Not(Diamond(P)), jane_john) == "it's impossible that Jane is watching a show"


def test_sentence_capitalizes_and_ends_with_period(jane_john):
    assert sentence(Not(Box(P)), jane_john) == "It's uncertain whether Jane is watching a show."
    assert sentence(Q, jane_john) == "John is reading a book."


def test_unrealizable_formulas_raise(jane_john):
    for bad in (
        And(P, Q),
        Box(And(P, Q)),
        Box(Box(P)),
        Not(Or(P, Q)),
        Not(Implies(Not(P), Q)),
        Atom("r"),
    ):
        with pytest.raises(RealizationError):
            clause(bad, jane_john)


def test_build_prompt_single_and_multi_premise():
    assert build_prompt(["A."], "b") == (
        "Consider the following statements:\nA.\n"
        "Question: Based on these statements, can we infer that b?\nAnswer:"
    )
    two = build_prompt(["A.", "B."], "c")
    assert two.count("\n") == 4


# -- lexicons -----------------------------------------------------------------


def test_natural_lexicon_contents():
    lex = natural_lexicon()
    assert lex.kind == "natural"
    assert len(lex.names) == len(set(lex.names)) == 200
    assert {"Jane", "John"} <= set(lex.names)
    assert len(lex.verb_phrases) == len(set(lex.verb_phrases)) == 216
    assert {"watching a show", "reading a book", "going shopping"} <= set(lex.verb_phrases)
    for vp in lex.verb_phrases:
        assert vp.split()[0].endswith("ing"), vp


def test_nonsense_lexicon_deterministic_and_disjoint():
    a = make_nonsense_lexicon(seed=7)
    b = make_nonsense_lexicon(seed=7)
    assert a == b
    assert a != make_nonsense_lexicon(seed=8)
    assert a.kind == "nonsense"
    assert a.names == natural_lexicon().names  # real names, invented activities
    natural_gerunds = {vp.split()[0] for vp in natural_lexicon().verb_phrases}
    for vp in a.verb_phrases:
        gerund = vp.split()[0]
        assert gerund.endswith("ing")
        assert gerund not in natural_gerunds, vp


def test_interpretation_validation():
    with pytest.raises(LexiconError):
        Interpretation(("Jane", "running"), ("Jane", "swimming"))
    with pytest.raises(LexiconError):
        Interpretation(("Jane", "running"), ("John", "running"))


def test_sample_interpretations():
    lex = natural_lexicon()
    draws = sample_interpretations(lex, 50, seed=3)
    assert draws == sample_interpretations(lex, 50, seed=3)
    assert draws != sample_interpretations(lex, 50, seed=4)
    assert len(draws) == 50
    for interp in draws:
        first_subj, first_vp = interp.first
        second_subj, second_vp = interp.second
        assert first_subj != second_subj
        assert first_vp != second_vp
        assert {first_subj, second_subj} <= set(lex.names)
    with pytest.raises(LexiconError):
        sample_interpretations(lex, 0)


def test_lexicon_round_trip(tmp_path):
    lex = make_nonsense_lexicon(seed=1)
    path = tmp_path / "lex.json"
    lex.save(path)
    assert Lexicon.load(path) == lex


# -- dataset files ------------------------------------------------------------


def test_dataset_layout(small_items):
    path, items = small_items
    assert len(items) == 120  # 24 forms x 5 interpretations
    assert items[0].item_id == "propositional-disj_l-entail.0000"
    assert items[4].item_id == "propositional-disj_l-entail.0004"
    assert items[5].item_id == "propositional-disj_r-entail.0000"
    assert items[-1].item_id == "may-modus_tollens_r-fallacy.0004"
    assert sum(i.ground_truth == "Yes" for i in items) == 60
    # the same interpretation sequence is reused for every form, so item k of
    # any form mentions the same people doing the same things
    for k in range(5):
        slots = {(i.subjects, i.verb_phrases) for i in items if i.item_id.endswith(f".{k:04d}")}
        assert len(slots) == 1


def test_dataset_is_reproducible(tmp_path, small_items):
    path, _ = small_items
    again = tmp_path / "again.jsonl"
    generate_dataset(again, families=("main24",), n=5, seed=42)
    assert again.read_bytes() == path.read_bytes()
    shifted = tmp_path / "shifted.jsonl"
    generate_dataset(shifted, families=("main24",), n=5, seed=43)
    assert shifted.read_bytes() != path.read_bytes()


def test_dataset_meta_sidecar(small_items):
    path, items = small_items
    meta = read_meta(path)
    assert meta.families == ("main24",)
    assert meta.n_interpretations == 5
    assert meta.seed == 42
    assert meta.lexicon_kind == "natural"
    assert meta.item_count == 120
    assert meta.yes_count == 60
    raw = json.loads(meta_path_for(path).read_text())
    assert "timestamp" not in raw


def test_read_items_round_trip(small_items):
    path, items = small_items
    again = read_items(path)
    assert again == items


def test_read_items_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"item_id": "x"}\nnot json\n')
    with pytest.raises(DatasetError) as err:
        read_items(bad)
    assert "bad.jsonl" in str(err.value)


def test_generate_dataset_validates_inputs(tmp_path):
    with pytest.raises(ValueError):
        generate_dataset(tmp_path / "x.jsonl", families=("main-24",), n=1)
    with pytest.raises(DatasetError):
        generate_dataset(tmp_path / "y.jsonl", families=("main24",), n=1, lexicon_kind="martian")


def test_nonsense_dataset(tmp_path):
    path = tmp_path / "nonsense.jsonl"
    generate_dataset(path, families=("main24",), n=2, seed=42, lexicon_kind="nonsense")
    items = read_items(path)
    assert all(i.lexicon_kind == "nonsense" for i in items)
    natural_vps = set(natural_lexicon().verb_phrases)
    assert not any(vp in natural_vps for i in items for vp in i.verb_phrases)
