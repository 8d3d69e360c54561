// DTOs mirroring the triage API wire format (see docs/formats.md).
export const MAX_ROUNDS = 2;
