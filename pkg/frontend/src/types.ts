/**
 * TypeScript mirrors of the JSON documents the backend serves.
 *
 * Field names and shapes follow the wire format exactly; nothing here is
 * re-modeled, so a parsed response can be re-serialized byte-identically.
 */

export interface LibraryRef {
  name: string;
  version: string;
}

/** Normalized literal: tag in {none, bool, int, float, string, dynamic, opaque_literal}. */
export interface LiteralValueJson {
  tag: string;
  text: string;
}

// ----- api/1 ---------------------------------------------------------------

export interface ParameterJson {
  name: string;
  position: number;
  kind: string; // positional_only | positional_or_keyword | keyword_only | var_positional | var_keyword
  default: LiteralValueJson | null;
  type_hint: string | null;
}

export interface CallableJson {
  qname: string;
  constructor: boolean;
  docstring: string | null;
  decorators: string[];
  parameters: ParameterJson[];
}

export interface ClassJson {
  qname: string;
  superclasses: string[];
  docstring: string | null;
  decorators: string[];
  methods: CallableJson[];
}

export interface ReexportJson {
  alias: string;
  target: string;
}

export interface ModuleJson {
  qname: string;
  classes: ClassJson[];
  functions: CallableJson[];
  reexports: ReexportJson[];
}

export interface ApiModelJson {
  schema: "api/1";
  library: LibraryRef;
  modules: ModuleJson[];
}

// ----- usages/1 ------------------------------------------------------------

export interface ClassCountJson {
  count: number;
  constructor_count: number;
}

export interface CallableCountJson {
  count: number;
  opaque_count: number;
}

export interface ParameterCountJson {
  explicit_count: number;
  values: Record<string, number>; // normalized value text -> occurrences
}

export interface MiningReportJson {
  files_total: number;
  files_using_library: number;
  files_skipped: number;
}

export interface UsagesJson {
  schema: "usages/1";
  library: LibraryRef;
  report: MiningReportJson;
  lints: unknown[];
  classes: Record<string, ClassCountJson>;
  callables: Record<string, CallableCountJson>;
  parameters: Record<string, ParameterCountJson>;
}

// ----- classification/1 ----------------------------------------------------

export interface ClassUseJson {
  used: boolean;
}

export interface CallableUseJson {
  used: boolean;
  constructor: boolean;
}

export interface ParamUseJson {
  used: boolean;
  useful: boolean;
  useless: boolean;
  values: string[]; // distinct observed value texts, sorted
  explicit_count: number;
  has_default: boolean;
}

export interface ClassificationJson {
  schema: "classification/1";
  library: LibraryRef;
  classes: Record<string, ClassUseJson>;
  callables: Record<string, CallableUseJson>;
  parameters: Record<string, ParamUseJson>;
}

// ----- annotations/1 -------------------------------------------------------

export type AnnotationKind = "remove" | "attribute" | "group" | "enum" | "move";
export type AnnotationOrigin = "auto" | "manual";

export interface GroupVariantJson {
  variant_name: string;
  discriminator_value: string;
  member_params: string[];
}

export interface GroupSpecJson {
  group_name: string;
  discriminator_param: string;
  variants: GroupVariantJson[];
}

export interface EnumMemberJson {
  member_name: string;
  string_value: string;
}

export interface EnumSpecJson {
  enum_name: string;
  members: EnumMemberJson[];
}

export interface AnnotationJson {
  target: string;
  kind: AnnotationKind;
  origin: AnnotationOrigin;
  baked_value?: LiteralValueJson;
  default_override?: LiteralValueJson;
  group?: GroupSpecJson;
  enum?: EnumSpecJson;
  destination_module?: string;
}

export interface AnnotationSetJson {
  schema: "annotations/1";
  library: LibraryRef;
  annotations: AnnotationJson[];
}

// ----- migration/1 ---------------------------------------------------------

export interface SignatureChangeJson {
  qname: string;
  old_params: ParameterJson[];
  new_params: ParameterJson[];
}

export interface DeprecationFactJson {
  target: string;
  since_version: string;
  removal_version?: string;
  replacement?: string;
  note?: string;
}

export interface ApiDiffJson {
  added: string[];
  removed: string[];
  signature_changed: SignatureChangeJson[];
  deprecated: DeprecationFactJson[];
}

export interface ConflictRowJson {
  target: string;
  kind?: string;
  original_target?: string;
  reason: string;
}

export interface MigrationConflictsJson {
  dropped: ConflictRowJson[];
  needs_review: ConflictRowJson[];
  unannotated_additions: string[];
}

export interface MigrationJson {
  schema: "migration/1";
  library: { name: string; old_version: string; new_version: string };
  diff: ApiDiffJson;
  migration: {
    annotations: AnnotationSetJson;
    conflicts: MigrationConflictsJson;
  } | null;
}

// ----- service odds and ends ------------------------------------------------

export interface HealthJson {
  status: string;
  tool: { name: string; version: string };
  schemas: Record<string, string>;
  library: LibraryRef;
}

export interface DiagnosticJson {
  severity: "error" | "warning";
  target: string;
  message: string;
}

export interface ValidationResultJson {
  errors: DiagnosticJson[];
  warnings: DiagnosticJson[];
}

export interface GeneratedFileJson {
  path: string;
  content: string;
}

export interface GeneratedJson {
  schema: "generated/1";
  package: string;
  files: GeneratedFileJson[];
}
