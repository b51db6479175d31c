// Wire types mirroring the service's published payload schemas.

export interface PostCard {
  post_id: string;
  title: string;
  thumbnail: string | null;
  author: string;
  created_at: number;
  num_comments: number;
  num_ui: number | null;
  num_ve: number | null;
  score: number | null;
}

export interface OverviewPayload {
  total: number;
  offset: number;
  limit: number;
  facets: { ui: string[]; ve: string[] };
  active: { ui: string | null; ve: string | null };
  posts: PostCard[];
}

export interface KeywordSpan {
  start: number;
  end: number;
  canonical: string;
}

export type FeedbackLabel = "critique" | "suggestion" | "rationale" | "other";

export interface SentenceSpan {
  start: number;
  end: number;
  label: FeedbackLabel;
  confidence: number;
  highlighted: boolean;
}

export interface CommentView {
  comment_id: string;
  author: string;
  created_at: number;
  body: string;
  mention_count: number;
  keyword_spans: KeywordSpan[];
  sentences: SentenceSpan[];
}

export interface ReadingPayload {
  post: {
    post_id: string;
    title: string;
    body: string;
    image_refs: string[];
    author: string;
    created_at: number;
  };
  active: { ui: string | null; ve: string | null; feedback: string | null };
  comments: CommentView[];
  navigation: { previous_post_id: string | null };
  recommendations: PostCard[];
}

export interface MapLink {
  post_id: string;
  comment_id: string;
}

export interface MapNode {
  node_id: string;
  title: string;
  note: string | null;
  link: MapLink | null;
  children: string[];
  created_at: number;
}

export interface MapDocument {
  schema: "mindmap/v1";
  map_id: string;
  root: string;
  nodes: MapNode[];
  revision?: number;
}

export interface SessionEventInput {
  kind: "view_post" | "view_comment" | "filter_change" | "note_add" | "jump";
  timestamp: number;
  subject_id: string;
  detail?: Record<string, unknown>;
}

export interface ExplorationReport {
  session_id: string;
  threshold_ms: number;
  posts_explored: number;
  comments_explored: number;
  subjects: Array<{
    subject_id: string;
    subject_kind: "post" | "comment";
    total_ms: number;
    max_continuous_ms: number;
    explored: boolean;
  }>;
}
