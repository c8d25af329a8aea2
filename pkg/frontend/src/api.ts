/** Typed client for the prediction service. All numbers shown in the UI come
 * from these responses verbatim; the client never recomputes scores. */

export type Scheme = "non_weighted" | "weighted" | "personalized";

export interface FeatureInfo {
  name: string;
  kind: "numeric" | "categorical-ordinal";
  min: number;
  max: number;
}

export interface SchemaResponse {
  features: FeatureInfo[];
}

export interface ModelRule {
  text: string;
  global_accuracy: number;
}

export interface ModelResponse {
  rules: ModelRule[];
  flags: string[];
  metadata: Record<string, unknown>;
}

export interface RuleAssessment {
  text: string;
  output: 0 | 1;
  prc: number;
  weight: number;
}

export interface Prediction {
  rules: RuleAssessment[];
  raw_score: number;
  probability: number;
  reliability: number;
  unanimous: boolean;
  scheme: Scheme;
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(fetchFn: FetchLike, path: string): Promise<T> {
  const res = await fetchFn(path);
  if (!res.ok) throw new ApiError(res.status, `GET ${path} failed`);
  return (await res.json()) as T;
}

export function fetchSchema(fetchFn: FetchLike): Promise<SchemaResponse> {
  return getJson(fetchFn, "/api/schema");
}

export function fetchModel(fetchFn: FetchLike): Promise<ModelResponse> {
  return getJson(fetchFn, "/api/model");
}

export async function postPredict(
  fetchFn: FetchLike,
  features: Record<string, number>,
  scheme: Scheme,
): Promise<Prediction> {
  const res = await fetchFn("/api/predict", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ features, scheme }),
  });
  if (!res.ok) {
    let detail = `predict failed (${res.status})`;
    try {
      const body = (await res.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // keep the generic message
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as Prediction;
}
