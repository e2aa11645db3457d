/** Payload shapes of the espace HTTP API (see src/espace/schemas). */

export type Link = [start: number, end: number, uri: string];

export interface HealthResponse {
  schema_version: number;
  profile: 'ose' | 'hwn' | 'yai4hu';
  bundle_hash: string;
  nodes: number;
  open_qa_enabled: boolean;
}

export interface EntryBlock {
  paragraph_id: string;
  text: string;
  links: Link[];
}

export interface EntryResponse {
  schema_version: number;
  profile: string;
  document_id: string;
  blocks: EntryBlock[];
  documents: { id: string; title: string; url?: string | null }[];
}

export interface AnswerUnit {
  snippet: string;
  context: string;
  score: number;
  assigned_archetype: string;
  links?: Link[];
}

export interface SummaryTreeNode {
  id: string;
  summary: string;
  unit_index: number | null;
  children: SummaryTreeNode[];
}

export interface Section {
  tree: SummaryTreeNode | null;
  units: AnswerUnit[];
}

export interface OverviewResponse {
  schema_version: number;
  uri: string;
  label: string;
  abstract: string;
  abstract_links?: Link[];
  type_labels: string[];
  super_classes: string[];
  sub_classes: string[];
  sub_types: string[];
  taxonomy_parent: string | null;
  sections: Record<string, Section>;
}

export interface SummaryChild {
  id: string;
  summary: string;
  unit_index: number | null;
  leaf: boolean;
}

export interface SummaryChildrenResponse {
  schema_version: number;
  node_id: string;
  children: SummaryChild[];
}

export interface AskAnswer {
  snippet: string;
  context: string;
  context_text?: string;
  score: number;
  source_triple: string | null;
  links?: Link[];
}

export interface AskResponse {
  schema_version: number;
  question: string;
  answers: AskAnswer[];
}

export interface ApiErrorBody {
  error: string;
  uri?: string;
  feature?: string;
  profile?: string;
}
