/**
 * Wire protocol: one JSON object per line, UTF-8, `\n` terminated.
 *
 * Requests name a model and carry the context window; responses echo
 * the request id and either the 9 x horizon quantile matrix or an
 * error message. The connection stays alive after an error.
 */

export const DECIMAL_QUANTILES = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

export interface BridgeRequest {
  id: string;
  model: string;
  context: number[];
  /** Calendar date of the first context value (ISO YYYY-MM-DD). */
  start_date: string;
  horizon: number;
  quantiles: number[];
  num_samples: number;
  seed: number;
}

export interface OkResponse {
  id: string;
  status: "ok";
  quantile_rows: number[][];
}

export interface ErrorResponse {
  id: string;
  status: "error";
  message: string;
}

export type BridgeResponse = OkResponse | ErrorResponse;

export class ProtocolError extends Error {
  /** Request id to echo in the error response, when recoverable. */
  requestId?: string;
}

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

/**
 * Parse and validate one request line. Throws ProtocolError; when the
 * line was valid JSON carrying a usable id, the error includes it so
 * the response can still echo the request (only truly malformed input
 * answers with id "unknown").
 */
export function parseRequest(line: string): BridgeRequest {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (err) {
    throw new ProtocolError(`malformed JSON: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("request is not an object");
  }
  const obj = raw as Record<string, unknown>;
  if (typeof obj.id !== "string" || obj.id.length === 0) {
    throw new ProtocolError("missing request id");
  }
  try {
    return validateFields(obj, obj.id);
  } catch (err) {
    if (err instanceof ProtocolError) {
      err.requestId = obj.id;
    }
    throw err;
  }
}

function validateFields(obj: Record<string, unknown>, id: string): BridgeRequest {
  if (typeof obj.model !== "string" || obj.model.length === 0) {
    throw new ProtocolError("missing model name");
  }
  if (!Array.isArray(obj.context) || obj.context.length === 0 || !obj.context.every(isFiniteNumber)) {
    throw new ProtocolError("context must be a non-empty array of finite numbers");
  }
  if (typeof obj.start_date !== "string" || !/^\d{4}-\d{2}-\d{2}$/.test(obj.start_date)) {
    throw new ProtocolError("start_date must be an ISO YYYY-MM-DD string");
  }
  if (!Number.isInteger(obj.horizon) || (obj.horizon as number) < 1) {
    throw new ProtocolError("horizon must be an integer >= 1");
  }
  const quantiles =
    obj.quantiles === undefined ? [...DECIMAL_QUANTILES] : obj.quantiles;
  if (
    !Array.isArray(quantiles) ||
    quantiles.length === 0 ||
    !quantiles.every((q) => isFiniteNumber(q) && q > 0 && q < 1)
  ) {
    throw new ProtocolError("quantiles must be probabilities in (0, 1)");
  }
  for (let i = 1; i < quantiles.length; i++) {
    if (quantiles[i] <= quantiles[i - 1]) {
      throw new ProtocolError("quantiles must be strictly increasing");
    }
  }
  const numSamples = obj.num_samples === undefined ? 20 : obj.num_samples;
  if (!Number.isInteger(numSamples) || (numSamples as number) < 1) {
    throw new ProtocolError("num_samples must be an integer >= 1");
  }
  const seed = obj.seed === undefined ? 0 : obj.seed;
  if (!Number.isInteger(seed)) {
    throw new ProtocolError("seed must be an integer");
  }
  return {
    id,
    model: obj.model as string,
    context: obj.context as number[],
    start_date: obj.start_date as string,
    horizon: obj.horizon as number,
    quantiles: quantiles as number[],
    num_samples: numSamples as number,
    seed: seed as number,
  };
}

/** Serialize a request; the inverse of parseRequest for valid inputs. */
export function encodeRequest(request: BridgeRequest): string {
  return JSON.stringify(request);
}

export function encodeResponse(response: BridgeResponse): string {
  return JSON.stringify(response);
}

export function okResponse(id: string, rows: number[][]): OkResponse {
  for (let level = 1; level < rows.length; level++) {
    for (let day = 0; day < rows[level].length; day++) {
      if (rows[level][day] < rows[level - 1][day]) {
        throw new ProtocolError("quantile rows must be monotone across levels");
      }
    }
  }
  return { id, status: "ok", quantile_rows: rows };
}

export function errorResponse(id: string, message: string): ErrorResponse {
  return { id, status: "error", message };
}
