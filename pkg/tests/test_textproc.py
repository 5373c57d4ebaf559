from __future__ import annotations

from collections import Counter

from codesim.stemmer import stem
from codesim.textproc import (
    NlPipeline, comment_words, greedy_dictionary_split, nl_pipeline,
    split_identifier,
)


class TestSplitting:
    def test_camel_case(self):
        assert split_identifier("binSearch") == ["bin", "Search"]
        assert split_identifier("XMLParser") == ["XML", "Parser"]
        assert split_identifier("parseXML") == ["parse", "XML"]

    def test_underscores_and_digits(self):
        assert split_identifier("max_heap_size") == ["max", "heap", "size"]
        assert split_identifier("crc32_update") == ["crc", "update"]

    def test_greedy_dictionary_split(self):
        dictionary = frozenset({"hash", "map", "ha"})
        assert greedy_dictionary_split("hashmap", dictionary) == ["hash", "map"]
        # a word already in the dictionary is never split
        assert greedy_dictionary_split("hash", dictionary) == ["hash"]
        # uncoverable words stay whole
        assert greedy_dictionary_split("hashzq", dictionary) == ["hashzq"]


class TestPipeline:
    def test_binsearch_name(self):
        terms = nl_pipeline([("binSearch", "name")])
        assert terms == Counter({"bin": 1, "search": 1})

    def test_stop_words_and_single_chars(self):
        assert nl_pipeline([("TODO_fixme_x", "local")]) == Counter()
        assert nl_pipeline([("the_no_while", "comment")]) == Counter()

    def test_dictionary_split_in_pipeline(self):
        pipeline = NlPipeline(dictionary=frozenset({"hash", "map"}),
                              stop_words=frozenset())
        assert pipeline.process([("hashmap", "local")]) == Counter({"hash": 1, "map": 1})

    def test_multiset_counts_occurrences(self):
        terms = nl_pipeline([("gamma", "local"), ("gamma ray", "comment")])
        assert terms["gamma"] == 2

    def test_name_origin_tracking(self):
        pipeline = NlPipeline()
        counter, names = pipeline.process_with_origins(
            [("binSearch", "name"), ("low", "param")])
        assert names == {"bin", "search"}
        assert counter["low"] == 1


class TestStemmer:
    def test_classic_forms(self):
        assert stem("searching") == "search"
        assert stem("caresses") == "caress"
        assert stem("ponies") == "poni"
        assert stem("running") == "run"
        assert stem("relational") == "relat"
        assert stem("found") == "found"

    def test_short_words_untouched(self):
        assert stem("a") == "a"
        assert stem("io") == "io"


def test_comment_words_unfiltered():
    words = comment_words(["/* no match FOUND */", "if 42 then"])
    # no NL filtering here: stop-ish words stay, numbers are not words
    assert words == {"no", "match", "found", "if", "then"}
