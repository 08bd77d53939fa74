// Thin typed client over the record-service HTTP API.

import type {
  CommitResponse,
  Decision,
  ModelInfo,
  PatientRecord,
  SessionPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }

  get staleRevision(): boolean {
    return this.status === 409 && this.message.includes("stale revision");
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token?: string,
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["X-API-Token"] = this.token;
    return headers;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const error = (payload as { error?: { code?: string; message?: string } }).error;
      throw new ApiError(
        response.status,
        error?.code ?? "http_error",
        error?.message ?? `HTTP ${response.status}`,
      );
    }
    return payload as T;
  }

  getModel(): Promise<ModelInfo> {
    return this.request("GET", "/model");
  }

  createPatient(patientId?: string, observations?: Record<string, { state: string; timestamp?: number }>): Promise<PatientRecord> {
    return this.request("POST", "/patients", {
      patient_id: patientId ?? null,
      observations: observations ?? null,
    });
  }

  getPatient(patientId: string): Promise<PatientRecord> {
    return this.request("GET", `/patients/${encodeURIComponent(patientId)}`);
  }

  submitObservation(
    patientId: string,
    variable: string,
    state: string,
    timestamp?: number,
  ): Promise<SessionPayload> {
    return this.request("POST", `/patients/${encodeURIComponent(patientId)}/observations`, {
      variable,
      state,
      timestamp: timestamp ?? null,
    });
  }

  getSession(sessionId: string): Promise<SessionPayload> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  commitSession(sessionId: string, decisions: Record<string, Decision>): Promise<CommitResponse> {
    const body: Record<string, { action: string; state?: string }> = {};
    for (const [variable, decision] of Object.entries(decisions)) {
      body[variable] =
        decision.action === "replace"
          ? { action: "replace", state: decision.state }
          : { action: decision.action };
    }
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/commit`, {
      decisions: body,
    });
  }

  predict(patientId: string, variable: string): Promise<{ variable: string; state: string; confidence: number }> {
    return this.request(
      "GET",
      `/patients/${encodeURIComponent(patientId)}/predict?variable=${encodeURIComponent(variable)}`,
    );
  }
}
