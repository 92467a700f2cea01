import pytest
from hypothesis import given, strategies as st

from depframe.conllu import Sentence, Token
from depframe.vocab import NUM, PAD, ROOT, UNK, Vocabulary, normalize


def sent(*forms, deprel="dep", upos="X"):
    return Sentence(tuple(Token(i, f, upos=upos, head=0, deprel=deprel) for i, f in enumerate(forms, start=1)))


@pytest.mark.parametrize(
    "form, expected",
    [("The", "the"), ("1,234.5", NUM), (NUM, NUM), ("-3", NUM), ("+0.5", NUM), ("...", "..."), ("3rd", "3rd")],
)
def test_normalize(form, expected):
    assert normalize(form) == expected


def test_normalize_flags():
    assert normalize("The", lowercase=False) == "The"
    assert normalize("42", numbers=False) == "42"


@given(st.text(max_size=10))
def test_normalize_idempotent(form):
    assert normalize(normalize(form)) == normalize(form)


def corpus():
    return [sent("the", "cat"), sent("The", "dog"), sent("the", "end")]


def test_min_frequency_threshold():
    v = Vocabulary.fit(corpus(), min_frequency=2)
    assert "the" in v.forms
    enc = v.encode(sent("the", "cat"))
    assert enc.word_ids[2] == UNK
    assert enc.word_ids[1] == v.forms["the"]


def test_pretrained_alignment():
    v = Vocabulary.fit(corpus(), min_frequency=2, pretrained_forms={"cat"})
    assert "cat" in v.forms
    assert "dog" not in v.forms


def test_fit_deterministic():
    assert Vocabulary.fit(corpus(), 1).dumps() == Vocabulary.fit(corpus(), 1).dumps()


def test_fit_errors():
    with pytest.raises(ValueError):
        Vocabulary.fit([], 1)
    with pytest.raises(ValueError):
        Vocabulary.fit(corpus(), 0)


def test_special_layout_and_contiguity():
    v = Vocabulary.fit(corpus(), 1)
    for m in (v.forms, v.upos, v.deprels):
        assert [m.lookup(i) for i in range(3)] == ["<pad>", "<root>", "<unk>"]
        assert [m[m.lookup(i)] for i in range(len(m))] == list(range(len(m)))
    assert (PAD, ROOT, UNK) == (0, 1, 2)


def test_encode_shapes():
    v = Vocabulary.fit(corpus(), 1)
    enc = v.encode(sent("the", "cat"))
    assert len(enc.word_ids) == 3 and enc.word_ids[0] == ROOT and enc.upos_ids[0] == ROOT
    assert enc.length == 2
    again = v.encode(sent("the", "cat"))
    assert (enc.word_ids == again.word_ids).all()


def test_unknown_deprel_maps_to_unk():
    v = Vocabulary.fit(corpus(), 1)
    enc = v.encode(sent("the", deprel="never-seen"))
    assert enc.gold_label_ids[0] == UNK


def test_decode_recovers_known_forms():
    v = Vocabulary.fit(corpus(), 1)
    s = sent("The", "cat")
    assert v.decode_forms(v.encode(s)) == ["the", "cat"]


def test_frozen_size():
    v = Vocabulary.fit(corpus(), 1)
    size = len(v.forms)
    v.encode(sent("unseen", "words"))
    assert len(v.forms) == size


def test_save_load(tmp_path):
    v = Vocabulary.fit(corpus(), 1, lowercase=False)
    path = tmp_path / "vocab.txt"
    v.save(path)
    w = Vocabulary.load(path)
    assert w == v and w.lowercase is False
    assert path.read_text().startswith("[options]\n")


def test_load_rejects_gaps():
    text = Vocabulary.fit(corpus(), 1).dumps().replace("3\tthe", "7\tthe")
    with pytest.raises(ValueError):
        Vocabulary.loads(text)
