/** Typed client for the /v1 API. All UI state flows through these calls;
 * nothing is inferred client-side. */

import type {
  AnnotationSetDto,
  AnswerDto,
  ApiErrorBody,
  DocumentSummaryDto,
  EditDto,
  EvalResultDto,
  JobDto,
  ParagraphDto,
  ProjectDto,
  SchemaDto,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly details: unknown = null,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private token: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    asText = false,
  ): Promise<T> {
    const init: RequestInit = {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    };
    const resp = await this.fetchImpl(`${this.baseUrl}/v1${path}`, init);
    if (!resp.ok) {
      let parsed: Partial<ApiErrorBody> = {};
      try {
        parsed = (await resp.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; fall through with the status only
      }
      throw new ApiError(
        resp.status,
        parsed.code ?? "error",
        parsed.message ?? `HTTP ${resp.status}`,
        parsed.details ?? null,
      );
    }
    if (asText) {
      return (await resp.text()) as unknown as T;
    }
    return (await resp.json()) as T;
  }

  // projects ---------------------------------------------------------------

  listProjects(): Promise<{ projects: ProjectDto[] }> {
    return this.request("GET", "/projects");
  }

  createProject(name: string): Promise<{ project_id: string }> {
    return this.request("POST", "/projects", { name });
  }

  addMember(projectId: string, userId: string, privilege: string): Promise<unknown> {
    return this.request("POST", `/projects/${projectId}/members`, {
      user_id: userId,
      privilege,
    });
  }

  // documents ----------------------------------------------------------------

  uploadDocument(
    projectId: string,
    content: string,
    format: "plain-text" | "tei-xml",
  ): Promise<{ job_id: string }> {
    return this.request("POST", `/projects/${projectId}/documents`, { content, format });
  }

  listDocuments(projectId: string): Promise<{ documents: DocumentSummaryDto[] }> {
    return this.request("GET", `/projects/${projectId}/documents`);
  }

  getParagraphs(
    projectId: string,
    docId: string,
  ): Promise<{ doc_id: string; paragraphs: ParagraphDto[] }> {
    return this.request("GET", `/projects/${projectId}/documents/${docId}/paragraphs`);
  }

  // schema -------------------------------------------------------------------

  getSchema(projectId: string): Promise<SchemaDto> {
    return this.request("GET", `/projects/${projectId}/schema`);
  }

  putSchema(projectId: string, schema: SchemaDto): Promise<SchemaDto> {
    return this.request("PUT", `/projects/${projectId}/schema`, schema);
  }

  // annotations -----------------------------------------------------------------

  getAnnotations(
    projectId: string,
    docId: string,
    layer: "human" | "model" | "regex" = "human",
  ): Promise<AnnotationSetDto> {
    return this.request(
      "GET",
      `/projects/${projectId}/documents/${docId}/annotations?layer=${layer}`,
    );
  }

  getStandoff(projectId: string, docId: string, paraId: string): Promise<string> {
    const query = `format=standoff&para_id=${encodeURIComponent(paraId)}`;
    return this.request(
      "GET",
      `/projects/${projectId}/documents/${docId}/annotations?${query}`,
      undefined,
      true,
    );
  }

  putAnnotations(
    projectId: string,
    docId: string,
    entities: unknown[],
    relations: unknown[],
  ): Promise<AnnotationSetDto> {
    return this.request("PUT", `/projects/${projectId}/documents/${docId}/annotations`, {
      entities,
      relations,
    });
  }

  revise(
    projectId: string,
    docId: string,
    edits: EditDto[],
    baseLayer: "human" | "model" | "regex" = "human",
  ): Promise<AnnotationSetDto> {
    return this.request(
      "POST",
      `/projects/${projectId}/documents/${docId}/annotations/revise`,
      { base_layer: baseLayer, edits },
    );
  }

  // pipeline ----------------------------------------------------------------------

  train(projectId: string, target: "ner" | "rc", hyper: Record<string, number> = {}): Promise<{ job_id: string }> {
    return this.request("POST", `/projects/${projectId}/train`, { target, hyper });
  }

  autoAnnotate(projectId: string, documents: string[] = []): Promise<{ job_id: string }> {
    return this.request("POST", `/projects/${projectId}/auto-annotate`, { documents });
  }

  evaluate(
    projectId: string,
    predLayer: "human" | "model" | "regex",
    goldLayer: "human" | "model" | "regex",
    documents: string[] = [],
  ): Promise<EvalResultDto> {
    return this.request("POST", `/projects/${projectId}/evaluate`, {
      documents,
      pred_layer: predLayer,
      gold_layer: goldLayer,
    });
  }

  buildGraph(projectId: string): Promise<{ job_id: string }> {
    return this.request("POST", `/projects/${projectId}/graph/build`);
  }

  buildIndex(projectId: string): Promise<{ job_id: string }> {
    return this.request("POST", `/projects/${projectId}/index/build`);
  }

  ask(projectId: string, text: string, modelId = "mock"): Promise<AnswerDto> {
    return this.request("POST", `/projects/${projectId}/ask`, {
      text,
      model_id: modelId,
    });
  }

  getJob(jobId: string): Promise<JobDto> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  async waitForJob(jobId: string, timeoutMs = 120_000, pollMs = 300): Promise<JobDto> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.getJob(jobId);
      if (job.state === "done") return job;
      if (job.state === "failed") {
        throw new ApiError(500, "job_failed", job.log);
      }
      if (Date.now() > deadline) {
        throw new ApiError(408, "job_timeout", `job ${jobId} still ${job.state}`);
      }
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }
}
