/**
 * Typed client for the backend's /v1 endpoints. One base-URL setting; every
 * response is canonical JSON, and `annotationsRaw` exposes the exact bytes
 * for parity checks against local export.
 */

import { canonicalText } from "./canonical.js";
import type {
  AnnotationSetJson,
  ApiModelJson,
  ClassificationJson,
  DiagnosticJson,
  GeneratedJson,
  HealthJson,
  UsagesJson,
  ValidationResultJson,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly url: string,
    detail: string,
  ) {
    super(`${url} -> ${status}: ${detail}`);
  }
}

export type PutOutcome =
  | { ok: true; accepted: number; warnings: DiagnosticJson[] }
  | { ok: false; status: number; errors: DiagnosticJson[]; warnings: DiagnosticJson[] };

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path;
  }

  private async getJson<T>(path: string): Promise<T> {
    const url = this.url(path);
    const response = await this.fetchImpl(url);
    if (!response.ok) {
      throw new ServiceError(response.status, url, await response.text());
    }
    return (await response.json()) as T;
  }

  health(): Promise<HealthJson> {
    return this.getJson("/v1/health");
  }

  model(publicOnly = false): Promise<ApiModelJson> {
    return this.getJson(publicOnly ? "/v1/model?public=true" : "/v1/model");
  }

  usages(): Promise<UsagesJson> {
    return this.getJson("/v1/usages");
  }

  classification(): Promise<ClassificationJson> {
    return this.getJson("/v1/classification");
  }

  annotations(): Promise<AnnotationSetJson> {
    return this.getJson("/v1/annotations");
  }

  /** The annotation set exactly as the server serializes it. */
  async annotationsRaw(): Promise<Uint8Array> {
    const url = this.url("/v1/annotations");
    const response = await this.fetchImpl(url);
    if (!response.ok) {
      throw new ServiceError(response.status, url, await response.text());
    }
    return new Uint8Array(await response.arrayBuffer());
  }

  async putAnnotations(set: AnnotationSetJson): Promise<PutOutcome> {
    const url = this.url("/v1/annotations");
    const response = await this.fetchImpl(url, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: canonicalText(set),
    });
    if (response.ok) {
      const body = (await response.json()) as {
        accepted: number;
        warnings: DiagnosticJson[];
      };
      return { ok: true, accepted: body.accepted, warnings: body.warnings };
    }
    if (response.status === 422) {
      const body = (await response.json()) as ValidationResultJson;
      return { ok: false, status: 422, errors: body.errors, warnings: body.warnings };
    }
    throw new ServiceError(response.status, url, await response.text());
  }

  async suggest(moves = true): Promise<AnnotationSetJson> {
    const url = this.url(moves ? "/v1/annotations/suggest" : "/v1/annotations/suggest?moves=false");
    const response = await this.fetchImpl(url, { method: "POST" });
    if (!response.ok) {
      throw new ServiceError(response.status, url, await response.text());
    }
    return (await response.json()) as AnnotationSetJson;
  }

  async generate(packageName?: string): Promise<GeneratedJson> {
    const url = this.url("/v1/generate");
    const init: RequestInit = { method: "POST" };
    if (packageName !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify({ package_name: packageName });
    }
    const response = await this.fetchImpl(url, init);
    if (!response.ok) {
      throw new ServiceError(response.status, url, await response.text());
    }
    return (await response.json()) as GeneratedJson;
  }
}
