"""Vocabulary types: qualified names, literal normalization, model indexing."""

import json

import pytest
from hypothesis import given, strategies as st

from apislim.model import (
    ApiModel,
    Callable,
    ClassInfo,
    DYNAMIC_TEXT,
    KIND_CLASS,
    KIND_FUNCTION,
    KIND_MODULE,
    KIND_PARAMETER,
    LiteralValue,
    ModelError,
    ModuleInfo,
    Parameter,
    QualifiedName,
)

IDENT = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True)


def qname_strategy():
    def build(segments, kind):
        if kind == KIND_PARAMETER and len(segments) < 2:
            segments = segments + ["param"]
        return QualifiedName(tuple(segments), kind)

    return st.builds(
        build,
        st.lists(IDENT, min_size=1, max_size=5),
        st.sampled_from([KIND_MODULE, KIND_CLASS, KIND_FUNCTION, KIND_PARAMETER]),
    )


class TestQualifiedName:
    @given(qname_strategy())
    def test_render_parse_bijection(self, q):
        assert QualifiedName.parse(q.render(), q.kind) == q

    def test_parameter_rendering_uses_hash_separator(self):
        q = QualifiedName(("minilearn", "models", "Ridge", "__init__", "alpha"), KIND_PARAMETER)
        assert q.render() == "minilearn.models.Ridge.__init__#alpha"
        assert QualifiedName.parse(q.render()) == q

    def test_parse_infers_parameter_kind_from_separator(self):
        q = QualifiedName.parse("a.b.f#x")
        assert q.kind == KIND_PARAMETER
        assert q.segments == ("a", "b", "f", "x")

    def test_invalid_segments_rejected(self):
        with pytest.raises(ModelError):
            QualifiedName(("a", "b-c"), KIND_MODULE)
        with pytest.raises(ModelError):
            QualifiedName((), KIND_MODULE)

    def test_child(self):
        base = QualifiedName(("lib", "mod"), KIND_MODULE)
        assert base.child("Cls", KIND_CLASS).render() == "lib.mod.Cls"


class TestLiteralValue:
    @given(st.integers())
    def test_integer_text_round_trip(self, n):
        lv = LiteralValue.integer(n)
        assert LiteralValue.from_text(lv.text) == lv

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_float_text_round_trip(self, x):
        lv = LiteralValue.floating(x)
        assert LiteralValue.from_text(lv.text) == lv

    @given(st.text(max_size=40))
    def test_string_text_round_trip(self, s):
        lv = LiteralValue.string(s)
        assert LiteralValue.from_text(lv.text) == lv
        assert lv.text.startswith("'") and lv.text.endswith("'")

    def test_fixed_forms(self):
        assert LiteralValue.none().text == "None"
        assert LiteralValue.boolean(True).text == "True"
        assert LiteralValue.boolean(False).text == "False"
        assert LiteralValue.dynamic().text == DYNAMIC_TEXT
        assert LiteralValue.from_text("None").tag == "none"
        assert LiteralValue.from_text("True").tag == "bool"
        assert LiteralValue.from_text(DYNAMIC_TEXT).tag == "dynamic"

    def test_string_normalization_is_single_quoted(self):
        assert LiteralValue.string("it's").text == "'it\\'s'"
        assert LiteralValue.string("a\nb").text == "'a\\nb'"

    def test_dynamic_sentinel_text_is_fixed(self):
        with pytest.raises(ModelError):
            LiteralValue("dynamic", "something else")

    def test_unknown_tag_rejected(self):
        with pytest.raises(ModelError):
            LiteralValue("bytes", "b''")

    @given(st.sampled_from(["none", "bool", "int", "float", "string", "dynamic", "opaque_literal"]),
           st.text(min_size=1, max_size=20))
    def test_json_round_trip(self, tag, text):
        if tag == "dynamic":
            text = DYNAMIC_TEXT
        lv = LiteralValue(tag, text)
        assert LiteralValue.from_json(json.loads(json.dumps(lv.to_json()))) == lv


class TestSignatureInvariants:
    def test_variadic_default_rejected(self):
        with pytest.raises(ModelError):
            Parameter("args", 0, "var_positional", default=LiteralValue.none())

    def test_noncontiguous_positions_rejected(self):
        q = QualifiedName(("lib", "f"), KIND_FUNCTION)
        with pytest.raises(ModelError):
            Callable(q, (Parameter("a", 0, "positional_or_keyword"),
                         Parameter("b", 2, "positional_or_keyword")))

    def test_duplicate_parameter_names_rejected(self):
        q = QualifiedName(("lib", "f"), KIND_FUNCTION)
        with pytest.raises(ModelError):
            Callable(q, (Parameter("a", 0, "positional_or_keyword"),
                         Parameter("a", 1, "positional_or_keyword")))

    def test_constructor_must_be_named_init(self):
        q = QualifiedName(("lib", "C", "create"), KIND_FUNCTION)
        with pytest.raises(ModelError):
            Callable(q, (), is_constructor=True)


def tiny_model(reexports=()):
    fn = Callable(
        QualifiedName(("lib", "mod", "run"), KIND_FUNCTION),
        (Parameter("x", 0, "positional_or_keyword"),),
    )
    return ApiModel(
        library_name="lib",
        library_version="1.0",
        modules=(
            ModuleInfo(QualifiedName(("lib",), KIND_MODULE), reexports=tuple(reexports)),
            ModuleInfo(QualifiedName(("lib", "mod"), KIND_MODULE), functions=(fn,)),
        ),
    )


class TestApiModel:
    def test_duplicate_definition_rejected(self):
        fn = Callable(QualifiedName(("lib", "run"), KIND_FUNCTION))
        model = ApiModel("lib", "1.0", (
            ModuleInfo(QualifiedName(("lib",), KIND_MODULE), functions=(fn, fn)),
        ))
        with pytest.raises(ModelError):
            model.lookup("lib.run")

    def test_lookup_and_alias_resolution(self):
        model = tiny_model(reexports=[("lib.run", "lib.mod.run")])
        assert model.lookup("lib.mod.run").name == "run"
        assert model.lookup("lib.run").name == "run"
        resolved = model.resolve_text("lib.run")
        assert resolved[0] == "lib.mod.run"

    def test_resolve_text_expands_alias_prefixes(self, minilearn_model):
        text, element = minilearn_model.resolve_text("minilearn.Ridge.fit")
        assert text == "minilearn.models.Ridge.fit"
        assert element.name == "fit"
        assert minilearn_model.resolve_text("minilearn.nothing") is None

    def test_publicness(self, minilearn_model):
        assert minilearn_model.is_public("minilearn.models.Ridge")
        assert minilearn_model.is_public("minilearn.models.Ridge.__init__")
        assert minilearn_model.is_public("minilearn.models.Ridge.__init__#alpha")
        assert not minilearn_model.is_public("minilearn.models._helper")
        assert not minilearn_model.is_public("minilearn.models._helper#arrays")
        with pytest.raises(KeyError):
            minilearn_model.is_public("minilearn.models.Missing")

    def test_reexport_makes_private_target_public(self, relib_model):
        assert relib_model.is_public("relib._impl.transform")
        assert relib_model.is_public("relib._impl.transform#scale")
        assert not relib_model.is_public("relib._impl._check")
        assert not relib_model.is_public("relib._impl")

    def test_serialization_round_trip_preserves_model(self, minilearn_model):
        doc = json.loads(minilearn_model.to_bytes())
        assert doc["schema"] == "api/1"
        again = ApiModel.from_json_dict(doc)
        assert again == minilearn_model
        assert again.to_bytes() == minilearn_model.to_bytes()

    def test_iterators_cover_surface(self, minilearn_model):
        classes = [c.name for c in minilearn_model.iter_classes()]
        assert sorted(classes) == ["Lasso", "Ridge", "SVC"]
        callables = list(minilearn_model.iter_callables())
        assert len(callables) == 5
        params = list(minilearn_model.iter_parameters())
        assert len(params) == 14
        texts = [t for t, _, _ in params]
        assert "minilearn.models.SVC.__init__#kernel" in texts
