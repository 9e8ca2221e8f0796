/** DTOs mirroring the /v1 API bodies. The UI is a pure client: every
 * displayed datum comes from one of these responses. */

export type Provenance = "human" | "regex" | "model";

export interface TokenDto {
  span: [number, number];
  surface: string;
  pos: string | null;
}

export interface SentenceDto {
  sent_id: string;
  span: [number, number];
  tokens: TokenDto[];
}

export interface ParagraphDto {
  para_id: string;
  text: string;
  source_section: string | null;
  sentences: SentenceDto[];
}

export interface DocumentSummaryDto {
  doc_id: string;
  title: string;
  paragraphs: number;
}

export interface ProjectDto {
  project_id: string;
  name: string;
  owner: string;
  privilege: "owner" | "annotator" | "viewer";
}

export interface SchemaDto {
  entities: string[];
  rules: [string, string, string][];
}

export interface EntityDto {
  ann_id: string;
  entity_type: string;
  para_id: string;
  span: [number, number];
  surface: string;
  provenance: Provenance;
}

export interface RelationDto {
  ann_id: string;
  relation_type: string;
  arg1: string;
  arg2: string;
  provenance: Provenance;
}

export interface AnnotationSetDto {
  doc_id: string;
  entities: EntityDto[];
  relations: RelationDto[];
}

export type EditDto =
  | { op: "add_entity"; entity_type: string; para_id: string; span: [number, number]; surface: string }
  | { op: "add_relation"; relation_type: string; arg1: string; arg2: string }
  | { op: "delete"; ann_id: string }
  | { op: "retype"; ann_id: string; new_type: string };

export interface JobDto {
  job_id: string;
  project_id: string;
  kind: string;
  state: "queued" | "running" | "done" | "failed";
  log: string;
}

export interface RetrievalHitDto {
  para_id: string;
  score: number;
}

export interface SubgraphNodeDto {
  node_id: string;
  kind: "DOCUMENT" | "PARAGRAPH" | "SENTENCE" | "ENTITY";
  props: Record<string, unknown>;
}

export interface SubgraphEdgeDto {
  edge_id: string;
  kind: string;
  src: string;
  dst: string;
}

export interface SubgraphDto {
  nodes: SubgraphNodeDto[];
  edges: SubgraphEdgeDto[];
}

export interface AnswerDto {
  summary: string;
  per_context: { para_id: string; answer: string }[];
  contexts: RetrievalHitDto[];
  subgraph: SubgraphDto;
  prompt_log: {
    kind: "per_context" | "summary";
    para_id: string | null;
    template_version: string;
    prompt: string;
    sha256: string;
  }[];
}

export interface EvalResultDto {
  precision: number;
  recall: number;
  micro_f1: number;
  support: number;
  counts: { tp: number; fp: number; fn: number };
  per_type: Record<
    string,
    { precision: number; recall: number; f1: number; tp: number; fp: number; fn: number; support: number }
  >;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: unknown;
}
