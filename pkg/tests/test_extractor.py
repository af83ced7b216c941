"""API surface extraction checked against hand-enumerated fixture facts."""

import keyword

import pytest
from hypothesis import given, settings, strategies as st

from apislim.extractor import SourceTree, extract_api, summarize_surface

from conftest import FIXTURES


def make_lib(tmp_path, files: dict):
    for rel, text in files.items():
        path = tmp_path / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return SourceTree.at(tmp_path)


MINILEARN_DEFINITIONS = {
    "minilearn",
    "minilearn.models",
    "minilearn.models.Ridge",
    "minilearn.models.Ridge.__init__",
    "minilearn.models.Ridge.__init__#alpha",
    "minilearn.models.Ridge.__init__#fit_intercept",
    "minilearn.models.Ridge.fit",
    "minilearn.models.Ridge.fit#X",
    "minilearn.models.Ridge.fit#y",
    "minilearn.models.Lasso",
    "minilearn.models.Lasso.__init__",
    "minilearn.models.Lasso.__init__#alpha",
    "minilearn.models.Lasso.__init__#copy_X",
    "minilearn.models.Lasso.__init__#max_iter",
    "minilearn.models.Lasso.__init__#positive",
    "minilearn.models.SVC",
    "minilearn.models.SVC.__init__",
    "minilearn.models.SVC.__init__#kernel",
    "minilearn.models.SVC.__init__#degree",
    "minilearn.models.SVC.__init__#gamma",
    "minilearn.models.SVC.__init__#cache_size",
    "minilearn.models.SVC.__init__#verbose",
    "minilearn.models._helper",
    "minilearn.models._helper#arrays",
}


class TestFixtureEnumeration:
    def test_surface_counts_match_hand_enumeration(self, minilearn_model):
        surface = summarize_surface(minilearn_model)
        assert len(minilearn_model.modules) == 2
        assert surface.classes_total == 3
        assert surface.functions_total == 5
        assert surface.params_total == 14
        assert surface.classes_public == 3
        assert surface.functions_public == 4
        assert surface.params_public == 13

    def test_every_definition_present(self, minilearn_model):
        defined = set(minilearn_model._index)
        assert defined == MINILEARN_DEFINITIONS

    def test_svc_signature_details(self, minilearn_model):
        ctor = minilearn_model.lookup("minilearn.models.SVC.__init__")
        names = [p.name for p in ctor.parameters]
        assert names == ["kernel", "degree", "gamma", "cache_size", "verbose"]
        defaults = {p.name: p.default for p in ctor.parameters}
        assert defaults["kernel"].tag == "string" and defaults["kernel"].text == "'rbf'"
        assert defaults["degree"].tag == "int" and defaults["degree"].text == "3"
        assert defaults["cache_size"].tag == "float" and defaults["cache_size"].text == "200.0"
        assert defaults["verbose"].tag == "bool" and defaults["verbose"].text == "False"

    def test_self_not_modeled(self, minilearn_model):
        for fn in minilearn_model.iter_callables():
            assert all(p.name != "self" for p in fn.parameters)

    def test_reexports_resolved_to_defining_module(self, minilearn_model):
        root = next(m for m in minilearn_model.modules if m.qname.render() == "minilearn")
        reexports = dict(root.reexports)
        assert reexports["minilearn.Ridge"] == "minilearn.models.Ridge"
        assert reexports["minilearn.Lasso"] == "minilearn.models.Lasso"
        assert reexports["minilearn.SVC"] == "minilearn.models.SVC"

    def test_docstrings_captured(self, minilearn_model):
        ridge = minilearn_model.lookup("minilearn.models.Ridge")
        assert "L2" in ridge.docstring


class TestExtractionBehavior:
    def test_determinism(self):
        tree = SourceTree.at(FIXTURES / "minilearn")
        first, _ = extract_api(tree, "0.1")
        second, _ = extract_api(tree, "0.1")
        assert first.to_bytes() == second.to_bytes()

    def test_exclude_glob(self):
        tree = SourceTree.at(FIXTURES / "minilearn", exclude=["**/models.py"])
        model, _ = extract_api(tree, "0.1")
        assert [m.qname.render() for m in model.modules] == ["minilearn"]

    def test_syntax_error_file_warned_and_skipped(self, tmp_path):
        tree = make_lib(tmp_path, {
            "lib/__init__.py": "",
            "lib/good.py": "def f(x):\n    return x\n",
            "lib/bad.py": "def broken(:\n",
        })
        model, report = extract_api(tree, "1.0")
        assert model.lookup("lib.good.f") is not None
        assert model.lookup("lib.bad") is None
        assert any("bad.py" in w["file"] for w in report.warnings)
        assert report.files_total == 3 and report.files_parsed == 2

    def test_missing_root_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            extract_api(SourceTree.at(tmp_path / "nowhere"), "1.0")

    def test_parameter_kinds(self, tmp_path):
        tree = make_lib(tmp_path, {
            "lib/__init__.py": "def f(a, /, b, *args, c, d=1, **kw):\n    pass\n",
        })
        model, _ = extract_api(tree, "1.0")
        fn = model.lookup("lib.f")
        kinds = [(p.name, p.assignment_kind) for p in fn.parameters]
        assert kinds == [
            ("a", "positional_only"),
            ("b", "positional_or_keyword"),
            ("args", "var_positional"),
            ("c", "keyword_only"),
            ("d", "keyword_only"),
            ("kw", "var_keyword"),
        ]
        assert fn.parameter("d").default.text == "1"
        assert fn.parameter("c").default is None

    def test_opaque_and_negative_defaults(self, tmp_path):
        tree = make_lib(tmp_path, {
            "lib/__init__.py": "def f(x=-2, y=0.5, z=[], w=None):\n    pass\n",
        })
        model, _ = extract_api(tree, "1.0")
        fn = model.lookup("lib.f")
        assert fn.parameter("x").default.text == "-2"
        assert fn.parameter("y").default.text == "0.5"
        assert fn.parameter("z").default.tag == "opaque_literal"
        assert fn.parameter("z").default.text == "[]"
        assert fn.parameter("w").default.tag == "none"

    def test_staticmethod_keeps_first_parameter(self, tmp_path):
        tree = make_lib(tmp_path, {
            "lib/__init__.py": (
                "class C:\n"
                "    @staticmethod\n"
                "    def make(x):\n"
                "        pass\n"
                "    @property\n"
                "    def value(self):\n"
                "        pass\n"
                "    @value.setter\n"
                "    def value(self, v):\n"
                "        pass\n"
            ),
        })
        model, _ = extract_api(tree, "1.0")
        make = model.lookup("lib.C.make")
        assert [p.name for p in make.parameters] == ["x"]
        value = model.lookup("lib.C.value")
        assert value.parameters == ()
        assert "property" in value.decorators

    def test_conditional_definitions_found(self, tmp_path):
        tree = make_lib(tmp_path, {
            "lib/__init__.py": (
                "import sys\n"
                "if sys.version_info >= (3, 8):\n"
                "    class New:\n"
                "        def __init__(self, x=1):\n"
                "            pass\n"
                "try:\n"
                "    def fallback(y):\n"
                "        pass\n"
                "except ImportError:\n"
                "    pass\n"
            ),
        })
        model, _ = extract_api(tree, "1.0")
        assert model.lookup("lib.New") is not None
        assert model.lookup("lib.fallback") is not None

    def test_nested_functions_not_modeled(self, tmp_path):
        tree = make_lib(tmp_path, {
            "lib/__init__.py": (
                "def outer(a):\n"
                "    def inner(b):\n"
                "        pass\n"
                "    return inner\n"
            ),
        })
        model, _ = extract_api(tree, "1.0")
        assert model.lookup("lib.outer") is not None
        assert model.lookup("lib.outer.inner") is None


NAME_POOL = [f"p{i}" for i in range(8)]


@st.composite
def signature_source(draw):
    total = draw(st.integers(min_value=1, max_value=6))
    names = NAME_POOL[:total]
    n_posonly = draw(st.integers(min_value=0, max_value=total))
    has_varargs = draw(st.booleans())
    remaining = total - n_posonly
    n_kwonly = draw(st.integers(min_value=0, max_value=remaining)) if (has_varargs or remaining) else 0
    if not has_varargs and n_kwonly == remaining and remaining and n_posonly == 0:
        n_kwonly -= 1  # keyword-only block needs a * separator or earlier params anyway
    n_pos = total - n_posonly - n_kwonly
    n_defaults = draw(st.integers(min_value=0, max_value=n_posonly + n_pos))

    pieces = []
    index = 0
    for _ in range(n_posonly):
        name = names[index]
        suffix = "=1" if index >= (n_posonly + n_pos - n_defaults) else ""
        pieces.append(name + suffix)
        index += 1
    if n_posonly:
        pieces.append("/")
    for _ in range(n_pos):
        name = names[index]
        suffix = "=1" if index >= (n_posonly + n_pos - n_defaults) else ""
        pieces.append(name + suffix)
        index += 1
    if has_varargs:
        pieces.append("*extra")
    elif n_kwonly:
        pieces.append("*")
    for _ in range(n_kwonly):
        default = draw(st.booleans())
        pieces.append(names[index] + ("=0" if default else ""))
        index += 1
    if draw(st.booleans()):
        pieces.append("**options")
    expected = list(names[:total])
    if has_varargs:
        expected.insert(n_posonly + n_pos, "extra")
    if pieces and pieces[-1] == "**options":
        expected.append("options")
    return ", ".join(pieces), expected


class TestSignatureOrderProperty:
    @settings(max_examples=60, deadline=None)
    @given(case=signature_source())
    def test_parameter_order_equals_source_order(self, case, tmp_path_factory):
        source_sig, expected = case
        tmp = tmp_path_factory.mktemp("sig")
        tree = make_lib(tmp, {"lib/__init__.py": f"def f({source_sig}):\n    pass\n"})
        model, report = extract_api(tree, "1.0")
        fn = model.lookup("lib.f")
        assert [p.name for p in fn.parameters] == expected
        assert [p.position for p in fn.parameters] == list(range(len(expected)))
        assert not keyword.iskeyword(fn.name)
        assert not report.warnings
