import pytest

from edl import corpus
from edl.corpus import (Document, GoldLink, LinkTarget, Mention, Token,
                        load_documents, load_gold, tokenize,
                        write_documents, write_submission)
from edl.errors import DuplicateDocId, MalformedInput, UnknownEntityType


class TestTokenize:
    def test_whitespace_split(self):
        tokens = tokenize("Kentucky Fried Chicken", "ENG")
        assert [(t.char_start, t.char_end) for t in tokens] == \
            [(0, 8), (9, 14), (15, 22)]

    def test_empty(self):
        assert tokenize("", "ENG") == []

    def test_chinese_per_character(self):
        tokens = tokenize("中国", "CMN")
        assert [t.surface for t in tokens] == ["中", "国"]
        assert [(t.char_start, t.char_end) for t in tokens] == \
            [(0, 1), (1, 2)]

    def test_punctuation_is_its_own_token(self):
        tokens = tokenize("George W. Bush", "ENG")
        assert [t.surface for t in tokens] == ["George", "W", ".", "Bush"]

    def test_offset_consistency(self):
        text = "El señor  López, de 42 años,\tllegó."
        for language in ("ENG", "SPA", "CMN"):
            for token in tokenize(text, language):
                assert text[token.char_start:token.char_end] == token.surface

    def test_chinese_skips_whitespace(self):
        tokens = tokenize("中 国", "CMN")
        assert [(t.surface, t.char_start) for t in tokens] == \
            [("中", 0), ("国", 2)]


class TestDocumentsIo:
    def test_round_trip(self, tmp_path):
        docs = [Document("d1", "line one\nline two", "NewsReport", "ENG"),
                Document("d2", "texto", "DiscussionForum", "SPA")]
        path = tmp_path / "docs.tsv"
        write_documents(docs, path)
        assert load_documents(path) == docs

    def test_duplicate_doc_id(self, tmp_path):
        path = tmp_path / "docs.tsv"
        path.write_text("d1\tNewsReport\tENG\ta\nd1\tNewsReport\tENG\tb\n",
                        encoding="utf-8")
        with pytest.raises(DuplicateDocId):
            load_documents(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "docs.tsv"
        path.write_text("", encoding="utf-8")
        assert load_documents(path) == []

    def test_malformed_line_number(self, tmp_path):
        path = tmp_path / "docs.tsv"
        path.write_text("d1\tNewsReport\tENG\tok\nbad line\n",
                        encoding="utf-8")
        with pytest.raises(MalformedInput) as err:
            load_documents(path)
        assert err.value.line_no == 2


class TestGoldIo:
    def _write(self, tmp_path, rows):
        path = tmp_path / "gold.tsv"
        path.write_text("".join("\t".join(r) + "\n" for r in rows),
                        encoding="utf-8")
        return path

    def test_kb_link(self, tmp_path):
        path = self._write(tmp_path, [
            ("sys", "M1", "England", "d1:0-7", "m.012abc", "GPE", "NAM",
             "1.0")])
        (link,) = load_gold(path)
        assert link.target == LinkTarget(kb_id="m.012abc")
        assert link.mention.char_start == 0 and link.mention.char_end == 7

    def test_nil_link(self, tmp_path):
        path = self._write(tmp_path, [
            ("sys", "M1", "Smith", "d1:3-8", "NIL0007", "PER", "NAM",
             "0.5")])
        (link,) = load_gold(path)
        assert link.target == LinkTarget(nil_cluster="NIL0007")

    def test_unknown_entity_type(self, tmp_path):
        path = self._write(tmp_path, [
            ("sys", "M1", "x", "d1:0-1", "NIL0001", "XYZ", "NAM", "1.0")])
        with pytest.raises(UnknownEntityType):
            load_gold(path)

    def test_round_trip(self, tmp_path):
        links = [
            GoldLink(Mention("d1", 0, 7, "England", "GPE", "NAM", 1.0),
                     LinkTarget(kb_id="m.02")),
            GoldLink(Mention("d1", 9, 14, "Smith", "PER", "NAM", 1.0),
                     LinkTarget(nil_cluster="NIL0001")),
        ]
        path = tmp_path / "gold.tsv"
        write_submission([(l.mention, l.target) for l in links], path)
        loaded = load_gold(path)
        assert [(l.mention, l.target) for l in loaded] == \
            [(l.mention, l.target) for l in links]


class TestWriteSubmission:
    def test_deterministic_ordering(self, tmp_path):
        rows = [
            (Mention("d2", 0, 1, "a", "PER", "NAM", 0.25),
             LinkTarget(kb_id="m.1")),
            (Mention("d1", 5, 9, "bbbb", "ORG", "NAM", 0.5),
             LinkTarget(nil_cluster="NIL0001")),
            (Mention("d1", 0, 3, "ccc", "GPE", "NAM", 1.0),
             LinkTarget(kb_id="m.2")),
        ]
        p1, p2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
        write_submission(rows, p1)
        write_submission(list(reversed(rows)), p2)
        assert p1.read_bytes() == p2.read_bytes()
        lines = p1.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 3
        assert [len(l.split("\t")) for l in lines] == [8, 8, 8]
        spans = [l.split("\t")[3] for l in lines]
        assert spans == ["d1:0-3", "d1:5-9", "d2:0-1"]

    def test_empty(self, tmp_path):
        path = tmp_path / "empty.tsv"
        write_submission([], path)
        assert path.read_bytes() == b""


def test_split_sentences_offsets():
    text = "first line\n\nthird"
    parts = corpus.split_sentences(text)
    assert parts == [(0, "first line"), (11, ""), (12, "third")]
    for offset, line in parts:
        assert text[offset:offset + len(line)] == line
