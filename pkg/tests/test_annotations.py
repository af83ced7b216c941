"""Annotation payloads, validation rules, and auto/manual merge precedence."""

import json

import pytest
from hypothesis import given, settings, strategies as st

from apislim.annotations import (
    Annotation,
    AnnotationSet,
    EnumMember,
    EnumSpec,
    GroupSpec,
    GroupVariant,
    accept_suggestion,
    merge,
    validate,
)
from apislim.classify import classify, suggest_removals
from apislim.jsonutil import canonical_json
from apislim.miner import mine_source
from apislim.model import LiteralValue

RIDGE = "minilearn.models.Ridge"
LASSO = "minilearn.models.Lasso"
SVC_INIT = "minilearn.models.SVC.__init__"


def aset(*annotations, library=("minilearn", "0.1")):
    return AnnotationSet.build(library[0], library[1], annotations)


def kernel_group(**overrides):
    spec = dict(
        group_name="Kernel",
        discriminator_param="kernel",
        variants=(
            GroupVariant("linear", "linear"),
            GroupVariant("poly", "poly", ("degree",)),
            GroupVariant("rbf", "rbf", ("gamma",)),
        ),
    )
    spec.update(overrides)
    return GroupSpec(**spec)


def criterion_enum():
    return EnumSpec("Criterion", (EnumMember("GINI", "gini"), EnumMember("ENTROPY", "entropy")))


class TestSerialization:
    def test_round_trip_covers_every_kind(self, minilearn_model):
        annotations = [
            Annotation(target=LASSO, kind="remove"),
            Annotation(
                target=f"{LASSO}.__init__#copy_X",
                kind="remove",
                origin="auto",
                baked_value=LiteralValue.boolean(True),
            ),
            Annotation(
                target=f"{SVC_INIT}#verbose",
                kind="attribute",
                default_override=LiteralValue.boolean(False),
            ),
            Annotation(target=SVC_INIT, kind="group", group=kernel_group()),
            Annotation(target=f"{SVC_INIT}#kernel", kind="enum", enum=criterion_enum()),
            Annotation(target=RIDGE, kind="move", destination_module="minilearn.regression"),
        ]
        original = aset(*annotations)
        doc = json.loads(canonical_json(original.to_json_dict()))
        assert doc["schema"] == "annotations/1"
        again = AnnotationSet.from_json_dict(doc)
        assert again == original
        assert canonical_json(again.to_json_dict()) == canonical_json(original.to_json_dict())

    def test_build_sorts_deterministically(self):
        a = Annotation(target="z.f", kind="remove")
        b = Annotation(target="a.f", kind="remove")
        assert aset(a, b).annotations == aset(b, a).annotations

    def test_wrong_schema_rejected(self):
        with pytest.raises(ValueError):
            AnnotationSet.from_json_dict({"schema": "nope/1", "library": {}, "annotations": []})


class TestValidateTargets:
    def test_unknown_target(self, minilearn_model):
        result = validate(aset(Annotation(target="minilearn.models.Tree", kind="remove")),
                          minilearn_model)
        assert not result.ok
        assert "unknown target" in result.errors[0].message

    def test_alias_target_rejected_with_pointer(self, minilearn_model):
        result = validate(aset(Annotation(target="minilearn.Ridge", kind="remove")),
                          minilearn_model)
        assert not result.ok
        assert "minilearn.models.Ridge" in result.errors[0].message

    def test_internal_element_warns(self, minilearn_model):
        result = validate(aset(Annotation(target="minilearn.models._helper", kind="remove")),
                          minilearn_model)
        assert result.ok
        assert any("internal" in w.message for w in result.warnings)

    def test_unknown_kind(self, minilearn_model):
        result = validate(aset(Annotation(target=RIDGE, kind="rename")), minilearn_model)
        assert any("unknown annotation kind" in e.message for e in result.errors)


class TestValidateRemove:
    def test_remove_class_ok(self, minilearn_model):
        assert validate(aset(Annotation(target=LASSO, kind="remove")), minilearn_model).ok

    def test_required_parameter_needs_baked_value(self, minilearn_model):
        bare = Annotation(target="minilearn.models.Ridge.fit#X", kind="remove")
        result = validate(aset(bare), minilearn_model)
        assert any("baked_value" in e.message for e in result.errors)
        baked = Annotation(
            target="minilearn.models.Ridge.fit#X",
            kind="remove",
            baked_value=LiteralValue.string("auto"),
        )
        assert validate(aset(baked), minilearn_model).ok

    def test_required_parameter_ok_when_owner_removed(self, minilearn_model):
        result = validate(
            aset(
                Annotation(target="minilearn.models.Ridge.fit#X", kind="remove"),
                Annotation(target="minilearn.models.Ridge.fit", kind="remove"),
            ),
            minilearn_model,
        )
        assert result.ok

    def test_baked_value_only_on_parameter_remove(self, minilearn_model):
        bad = Annotation(target=LASSO, kind="remove", baked_value=LiteralValue.integer(1))
        result = validate(aset(bad), minilearn_model)
        assert any("only valid for remove on a parameter" in e.message for e in result.errors)

    def test_baked_value_must_be_plain_literal(self, minilearn_model):
        bad = Annotation(
            target=f"{LASSO}.__init__#copy_X",
            kind="remove",
            baked_value=LiteralValue.dynamic(),
        )
        result = validate(aset(bad), minilearn_model)
        assert any("plain literal" in e.message for e in result.errors)

    def test_removing_used_element_warns_with_report(self, minilearn_model):
        counts = mine_source(
            "from minilearn.models import Lasso\nLasso()\n", minilearn_model, "c.py"
        ).counts
        report = classify(minilearn_model, counts)
        result = validate(aset(Annotation(target=LASSO, kind="remove")), minilearn_model, report)
        assert result.ok
        assert any("observed uses" in w.message for w in result.warnings)


class TestValidateAttribute:
    def test_constructor_parameter_ok(self, minilearn_model):
        ann = Annotation(target="minilearn.models.Ridge.__init__#fit_intercept", kind="attribute")
        assert validate(aset(ann), minilearn_model).ok

    def test_non_constructor_parameter_rejected(self, minilearn_model):
        ann = Annotation(target="minilearn.models.Ridge.fit#X", kind="attribute")
        result = validate(aset(ann), minilearn_model)
        assert any("constructor parameters" in e.message for e in result.errors)

    def test_default_override_only_for_attribute(self, minilearn_model):
        bad = Annotation(target=LASSO, kind="remove",
                         default_override=LiteralValue.boolean(False))
        result = validate(aset(bad), minilearn_model)
        assert any("default_override" in e.message for e in result.errors)

    def test_methodless_class_warns(self, minilearn_model):
        ann = Annotation(target=f"{SVC_INIT}#verbose", kind="attribute")
        result = validate(aset(ann), minilearn_model)
        assert result.ok
        assert any("no methods" in w.message for w in result.warnings)

    def test_positional_only_parameter_rejected(self, tmp_path):
        from apislim.extractor import SourceTree, extract_api

        lib = tmp_path / "poslib"
        lib.mkdir()
        (lib / "__init__.py").write_text(
            "class C:\n"
            "    def __init__(self, size=1, /, mode='a'):\n"
            "        pass\n"
            "    def run(self):\n"
            "        pass\n"
        )
        model, _ = extract_api(SourceTree.at(tmp_path), "1.0")
        result = validate(
            aset(Annotation(target="poslib.C.__init__#size", kind="attribute"),
                 library=("poslib", "1.0")),
            model,
        )
        assert any("positional-only" in e.message for e in result.errors)


class TestValidateGroup:
    def test_valid_group(self, minilearn_model):
        ann = Annotation(target=SVC_INIT, kind="group", group=kernel_group())
        assert validate(aset(ann), minilearn_model).ok

    def test_group_on_parameter_rejected(self, minilearn_model):
        ann = Annotation(target=f"{SVC_INIT}#kernel", kind="group", group=kernel_group())
        result = validate(aset(ann), minilearn_model)
        assert any("target callables" in e.message for e in result.errors)

    def test_unknown_discriminator_and_member(self, minilearn_model):
        ann = Annotation(
            target=SVC_INIT, kind="group",
            group=kernel_group(discriminator_param="mode",
                               variants=(GroupVariant("a", "a", ("missing",)),)),
        )
        result = validate(aset(ann), minilearn_model)
        messages = " | ".join(e.message for e in result.errors)
        assert "'mode' is not a parameter" in messages
        assert "'missing' is not a parameter" in messages

    def test_duplicate_variant_values_and_shared_members(self, minilearn_model):
        ann = Annotation(
            target=SVC_INIT, kind="group",
            group=kernel_group(variants=(
                GroupVariant("a", "same", ("degree",)),
                GroupVariant("b", "same", ("degree",)),
            )),
        )
        result = validate(aset(ann), minilearn_model)
        messages = " | ".join(e.message for e in result.errors)
        assert "duplicate discriminator value" in messages
        assert "more than one variant" in messages

    def test_grouped_parameter_may_carry_no_other_annotation(self, minilearn_model):
        group_ann = Annotation(target=SVC_INIT, kind="group", group=kernel_group())
        enum_ann = Annotation(target=f"{SVC_INIT}#kernel", kind="enum", enum=criterion_enum())
        result = validate(aset(group_ann, enum_ann), minilearn_model)
        assert any("claimed by the group" in e.message for e in result.errors)


class TestValidateEnum:
    def test_valid_enum(self, minilearn_model):
        ann = Annotation(target=f"{SVC_INIT}#kernel", kind="enum", enum=criterion_enum())
        assert validate(aset(ann), minilearn_model).ok

    def test_member_name_shape(self, minilearn_model):
        ann = Annotation(
            target=f"{SVC_INIT}#kernel", kind="enum",
            enum=EnumSpec("Kernel", (EnumMember("gini", "gini"),)),
        )
        result = validate(aset(ann), minilearn_model)
        assert any("UPPER_SNAKE" in e.message for e in result.errors)

    def test_duplicate_member_values(self, minilearn_model):
        ann = Annotation(
            target=f"{SVC_INIT}#kernel", kind="enum",
            enum=EnumSpec("Kernel", (EnumMember("A", "x"), EnumMember("B", "x"))),
        )
        result = validate(aset(ann), minilearn_model)
        assert any("duplicate enum value" in e.message for e in result.errors)

    def test_non_string_default_warns(self, minilearn_model):
        ann = Annotation(
            target=f"{SVC_INIT}#degree", kind="enum",
            enum=EnumSpec("Degree", (EnumMember("THREE", "3"),)),
        )
        result = validate(aset(ann), minilearn_model)
        assert result.ok
        assert any("not a string" in w.message for w in result.warnings)

    def test_enum_on_callable_rejected(self, minilearn_model):
        ann = Annotation(target=SVC_INIT, kind="enum", enum=criterion_enum())
        result = validate(aset(ann), minilearn_model)
        assert any("target parameters" in e.message for e in result.errors)


class TestValidateMove:
    def test_valid_move(self, minilearn_model):
        ann = Annotation(target=RIDGE, kind="move", destination_module="minilearn.regression")
        assert validate(aset(ann), minilearn_model).ok

    def test_destination_must_be_inside_library(self, minilearn_model):
        ann = Annotation(target=RIDGE, kind="move", destination_module="sklearn.linear_model")
        result = validate(aset(ann), minilearn_model)
        assert any("inside minilearn" in e.message for e in result.errors)

    def test_method_cannot_move(self, minilearn_model):
        ann = Annotation(target="minilearn.models.Ridge.fit", kind="move",
                         destination_module="minilearn.training")
        result = validate(aset(ann), minilearn_model)
        assert any("classes or module-level functions" in e.message for e in result.errors)

    def test_destination_collision_with_existing_definition(self, minilearn_model):
        ann = Annotation(target=RIDGE, kind="move", destination_module="minilearn.models.Lasso")
        result = validate(aset(ann), minilearn_model)
        assert not result.ok

    def test_move_plus_other_annotation_coexist(self, minilearn_model):
        result = validate(
            aset(
                Annotation(target=RIDGE, kind="move", destination_module="minilearn.regression"),
                Annotation(target=RIDGE, kind="remove"),
            ),
            minilearn_model,
        )
        assert result.ok

    def test_two_non_move_annotations_conflict(self, minilearn_model):
        result = validate(
            aset(
                Annotation(target=f"{SVC_INIT}#kernel", kind="enum", enum=criterion_enum()),
                Annotation(target=f"{SVC_INIT}#kernel", kind="remove"),
            ),
            minilearn_model,
        )
        assert any("conflicting annotations" in e.message for e in result.errors)


class TestMerge:
    def test_manual_wins_on_same_target(self):
        auto = aset(Annotation(target=LASSO, kind="remove", origin="auto"))
        manual = aset(Annotation(target=LASSO, kind="attribute", origin="manual"))
        merged, warnings = merge(auto, manual)
        assert len(merged.annotations) == 1
        assert merged.annotations[0].kind == "attribute"
        assert any("superseded" in w.message for w in warnings)

    def test_disjoint_targets_union(self):
        auto = aset(Annotation(target=LASSO, kind="remove", origin="auto"))
        manual = aset(Annotation(target=RIDGE, kind="remove", origin="manual"))
        merged, warnings = merge(auto, manual)
        assert len(merged.annotations) == 2 and warnings == []

    def test_library_mismatch_fatal(self):
        auto = aset(Annotation(target=LASSO, kind="remove"))
        manual = AnnotationSet.empty("minilearn", "0.2")
        with pytest.raises(ValueError):
            merge(auto, manual)

    def test_manual_group_claims_parameters(self, minilearn_model):
        auto = aset(Annotation(target=f"{SVC_INIT}#degree", kind="remove", origin="auto",
                               baked_value=LiteralValue.integer(3)))
        manual = aset(Annotation(target=SVC_INIT, kind="group", group=kernel_group()))
        merged, warnings = merge(auto, manual)
        assert all(a.target != f"{SVC_INIT}#degree" for a in merged.annotations)
        assert any("grouped manually" in w.message for w in warnings)
        assert validate(merged, minilearn_model).ok

    def test_auto_group_dropped_when_parameter_manually_annotated(self, minilearn_model):
        auto = aset(Annotation(target=SVC_INIT, kind="group", origin="auto",
                               group=kernel_group()))
        manual = aset(Annotation(target=f"{SVC_INIT}#kernel", kind="enum",
                                 enum=criterion_enum()))
        merged, warnings = merge(auto, manual)
        assert all(a.kind != "group" for a in merged.annotations)
        assert any("manual annotation" in w.message for w in warnings)
        assert validate(merged, minilearn_model).ok

    def test_merge_of_clean_sets_validates_clean(self, minilearn_model):
        counts = mine_source(
            "from minilearn.models import Ridge\nRidge(alpha=0.5).fit(X, y)\n",
            minilearn_model, "c.py",
        ).counts
        auto = suggest_removals(classify(minilearn_model, counts))
        manual = aset(
            Annotation(target=SVC_INIT, kind="group", group=kernel_group()),
            Annotation(target=RIDGE, kind="move", destination_module="minilearn.regression"),
        )
        assert validate(auto, minilearn_model).ok
        assert validate(manual, minilearn_model).ok
        merged, _ = merge(auto, manual)
        assert validate(merged, minilearn_model).ok


class TestAcceptSuggestion:
    def test_accept_flips_origin(self):
        auto = aset(Annotation(target=LASSO, kind="remove", origin="auto"))
        out = accept_suggestion(auto, LASSO, "remove")
        assert out.annotations[0].origin == "manual"
        unchanged = accept_suggestion(out, LASSO, "remove")
        assert unchanged == out


REMOVE_TARGETS = [
    "minilearn.models.Lasso",
    "minilearn.models.SVC",
    "minilearn.models.Ridge.fit",
    "minilearn.models.Lasso.__init__#alpha",
    "minilearn.models.Lasso.__init__#copy_X",
    "minilearn.models.SVC.__init__#verbose",
]


@st.composite
def clean_auto_manual_sets(draw):
    auto_targets = draw(st.sets(st.sampled_from(REMOVE_TARGETS), max_size=4))
    manual_targets = draw(st.sets(st.sampled_from(REMOVE_TARGETS), max_size=4))
    auto = [Annotation(target=t, kind="remove", origin="auto") for t in sorted(auto_targets)]
    manual = [Annotation(target=t, kind="remove", origin="manual") for t in sorted(manual_targets)]
    group_on_svc = draw(st.booleans())
    if group_on_svc:
        manual.append(Annotation(target=SVC_INIT, kind="group", group=kernel_group()))
    return (AnnotationSet.build("minilearn", "0.1", auto),
            AnnotationSet.build("minilearn", "0.1", manual))


class TestMergeProperty:
    @settings(max_examples=50, deadline=None)
    @given(sets=clean_auto_manual_sets())
    def test_merge_of_valid_sets_stays_valid(self, sets, minilearn_model):
        auto, manual = sets
        if not validate(auto, minilearn_model).ok or not validate(manual, minilearn_model).ok:
            return
        merged, _ = merge(auto, manual)
        result = validate(merged, minilearn_model)
        assert result.ok, [e.message for e in result.errors]
