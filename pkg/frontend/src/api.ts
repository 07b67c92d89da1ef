/** The one server call: POST annotated XML, get a view document back. */

import { SchemaError, validateView, type Diagnostic, type View } from "./schema.js";

export type TimelineResponse =
  | { ok: true; view: View }
  | { ok: false; diagnostics: Diagnostic[] };

export interface TimelineRequestOptions {
  dct?: string;
  spacing?: "ordinal" | "proportional";
  showEmptyDct?: boolean;
  fetchImpl?: typeof fetch;
}

export async function postTimeline(
  xml: string,
  options: TimelineRequestOptions = {},
): Promise<TimelineResponse> {
  const params = new URLSearchParams();
  if (options.dct) params.set("dct", options.dct);
  if (options.spacing) params.set("spacing", options.spacing);
  if (options.showEmptyDct) params.set("showEmptyDct", "true");
  const query = params.toString();
  const doFetch = options.fetchImpl ?? fetch;
  const response = await doFetch(`/api/timeline${query ? `?${query}` : ""}`, {
    method: "POST",
    headers: { "Content-Type": "application/xml; charset=utf-8" },
    body: xml,
  });
  const body: unknown = await response.json();
  if (response.status === 400) {
    const diagnostics = (body as { diagnostics?: Diagnostic[] }).diagnostics ?? [];
    return { ok: false, diagnostics };
  }
  if (!response.ok) {
    throw new Error(`timeline request failed: HTTP ${response.status}`);
  }
  try {
    return { ok: true, view: validateView(body) };
  } catch (err) {
    if (err instanceof SchemaError) {
      throw new Error(`server sent an unusable view document: ${err.problems[0]}`);
    }
    throw err;
  }
}
