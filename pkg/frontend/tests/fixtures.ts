/**
 * Compact in-memory workspace documents for the headless tests. One library,
 * two modules, a mix of used/unused/useless elements, one internal class,
 * variadic and positional-only parameters.
 */

import type {
  AnnotationSetJson,
  ApiModelJson,
  ClassificationJson,
  LiteralValueJson,
  ParameterJson,
  UsagesJson,
} from "../src/types.js";

function param(
  name: string,
  position: number,
  kind: string = "positional_or_keyword",
  def: LiteralValueJson | null = null,
): ParameterJson {
  return { name, position, kind, default: def, type_hint: null };
}

export const WIDGET = "lib.Widget";
export const WIDGET_INIT = "lib.Widget.__init__";
export const WIDGET_RUN = "lib.Widget.run";
export const LEGACY = "lib.Legacy";
export const LEGACY_INIT = "lib.Legacy.__init__";
export const HIDDEN = "lib._Hidden";
export const MAKE = "lib.make";
export const DROP = "lib.drop";
export const HELPER = "lib.util.helper";

export function modelDoc(): ApiModelJson {
  return {
    schema: "api/1",
    library: { name: "lib", version: "1.0" },
    modules: [
      {
        qname: "lib",
        classes: [
          {
            qname: WIDGET,
            superclasses: [],
            docstring: "A widget.",
            decorators: [],
            methods: [
              {
                qname: WIDGET_INIT,
                constructor: true,
                docstring: null,
                decorators: [],
                parameters: [
                  param("kernel", 0, "positional_or_keyword", { tag: "string", text: "'rbf'" }),
                  param("degree", 1, "positional_or_keyword", { tag: "int", text: "3" }),
                  param("copy", 2, "positional_or_keyword", { tag: "bool", text: "True" }),
                  param("tags", 3, "var_keyword"),
                ],
              },
              {
                qname: WIDGET_RUN,
                constructor: false,
                docstring: "Run it.",
                decorators: [],
                parameters: [
                  param("p0", 0, "positional_only"),
                  param("a", 1),
                  param("b", 2, "positional_or_keyword", { tag: "int", text: "1" }),
                  param("args", 3, "var_positional"),
                ],
              },
            ],
          },
          {
            qname: LEGACY,
            superclasses: [],
            docstring: null,
            decorators: [],
            methods: [
              {
                qname: LEGACY_INIT,
                constructor: true,
                docstring: null,
                decorators: [],
                parameters: [param("p", 0)],
              },
            ],
          },
          {
            qname: HIDDEN,
            superclasses: [],
            docstring: null,
            decorators: [],
            methods: [
              {
                qname: `${HIDDEN}.__init__`,
                constructor: true,
                docstring: null,
                decorators: [],
                parameters: [param("h", 0, "positional_or_keyword", { tag: "int", text: "0" })],
              },
            ],
          },
        ],
        functions: [
          {
            qname: MAKE,
            constructor: false,
            docstring: null,
            decorators: [],
            parameters: [param("size", 0, "positional_or_keyword", { tag: "int", text: "2" })],
          },
          {
            qname: DROP,
            constructor: false,
            docstring: null,
            decorators: [],
            parameters: [],
          },
        ],
        reexports: [],
      },
      {
        qname: "lib.util",
        classes: [],
        functions: [
          {
            qname: HELPER,
            constructor: false,
            docstring: null,
            decorators: [],
            parameters: [param("x", 0)],
          },
          {
            qname: "lib.util.drop",
            constructor: false,
            docstring: null,
            decorators: [],
            parameters: [],
          },
        ],
        reexports: [],
      },
    ],
  };
}

export function classificationDoc(): ClassificationJson {
  return {
    schema: "classification/1",
    library: { name: "lib", version: "1.0" },
    classes: {
      [WIDGET]: { used: true },
      [LEGACY]: { used: false },
    },
    callables: {
      [WIDGET_INIT]: { used: true, constructor: true },
      [WIDGET_RUN]: { used: true, constructor: false },
      [LEGACY_INIT]: { used: false, constructor: true },
      [MAKE]: { used: true, constructor: false },
      [DROP]: { used: false, constructor: false },
      [HELPER]: { used: false, constructor: false },
      "lib.util.drop": { used: false, constructor: false },
    },
    parameters: {
      [`${WIDGET_INIT}#kernel`]: {
        used: true,
        useful: true,
        useless: false,
        values: ["'poly'", "'rbf'"],
        explicit_count: 3,
        has_default: true,
      },
      [`${WIDGET_INIT}#degree`]: {
        used: true,
        useful: false,
        useless: true,
        values: ["3"],
        explicit_count: 2,
        has_default: true,
      },
      [`${WIDGET_INIT}#copy`]: {
        used: false,
        useful: false,
        useless: true,
        values: ["True"],
        explicit_count: 0,
        has_default: true,
      },
      [`${WIDGET_INIT}#tags`]: {
        used: false,
        useful: false,
        useless: true,
        values: [],
        explicit_count: 0,
        has_default: false,
      },
      [`${WIDGET_RUN}#p0`]: {
        used: true,
        useful: false,
        useless: true,
        values: ["5"],
        explicit_count: 2,
        has_default: false,
      },
      [`${WIDGET_RUN}#a`]: {
        used: true,
        useful: true,
        useless: false,
        values: ["1", "2"],
        explicit_count: 2,
        has_default: false,
      },
      [`${WIDGET_RUN}#b`]: {
        used: false,
        useful: false,
        useless: true,
        values: ["1"],
        explicit_count: 0,
        has_default: true,
      },
      [`${WIDGET_RUN}#args`]: {
        used: false,
        useful: false,
        useless: true,
        values: [],
        explicit_count: 0,
        has_default: false,
      },
      [`${LEGACY_INIT}#p`]: {
        used: false,
        useful: false,
        useless: true,
        values: [],
        explicit_count: 0,
        has_default: false,
      },
      [`${MAKE}#size`]: {
        used: true,
        useful: true,
        useless: false,
        values: ["2", "4"],
        explicit_count: 1,
        has_default: true,
      },
      [`${HELPER}#x`]: {
        used: false,
        useful: false,
        useless: true,
        values: [],
        explicit_count: 0,
        has_default: false,
      },
    },
  };
}

export function usagesDoc(): UsagesJson {
  return {
    schema: "usages/1",
    library: { name: "lib", version: "1.0" },
    report: { files_total: 3, files_using_library: 2, files_skipped: 0 },
    lints: [],
    classes: {
      [WIDGET]: { count: 4, constructor_count: 3 },
    },
    callables: {
      [WIDGET_INIT]: { count: 3, opaque_count: 0 },
      [WIDGET_RUN]: { count: 2, opaque_count: 0 },
      [MAKE]: { count: 1, opaque_count: 0 },
    },
    parameters: {
      [`${WIDGET_INIT}#kernel`]: { explicit_count: 3, values: { "'poly'": 2, "'rbf'": 1 } },
      [`${WIDGET_INIT}#degree`]: { explicit_count: 2, values: { "3": 3 } },
      [`${WIDGET_RUN}#p0`]: { explicit_count: 2, values: { "5": 2 } },
      [`${WIDGET_RUN}#a`]: { explicit_count: 2, values: { "1": 1, "2": 1 } },
      [`${MAKE}#size`]: { explicit_count: 1, values: { "2": 1, "4": 1 } },
    },
  };
}

export function emptyAnnotationsDoc(): AnnotationSetJson {
  return {
    schema: "annotations/1",
    library: { name: "lib", version: "1.0" },
    annotations: [],
  };
}
