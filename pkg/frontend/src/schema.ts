/**
 * The documented column contracts of the runner's tables, one per figure
 * kind, and the validation that turns a header mismatch into a precise
 * diagnostic instead of a malformed figure.
 */

export const FIGURE_KINDS = [
  "loglog-convergence",
  "profile",
  "landscape",
  "dispersion",
  "limit-extrapolation",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export function isFigureKind(s: string): s is FigureKind {
  return (FIGURE_KINDS as readonly string[]).includes(s);
}

/** Fixed-header contracts; limit-extrapolation is handled structurally. */
const FIXED_HEADERS: Partial<Record<FigureKind, string[]>> = {
  "loglog-convergence": ["level", "h", "residual", "ratio"],
  profile: ["x", "lambda"],
  landscape: ["x", "m2_closed", "m2_conformal", "discrepancy", "complex_flag"],
  dispersion: ["k", "E_numeric", "E_closed", "abs_gap"],
};

/**
 * Returns a list of human-readable problems; an empty list means the
 * header conforms to the kind's documented schema.
 */
export function headerProblems(kind: FigureKind, header: string[]): string[] {
  if (kind === "limit-extrapolation") {
    return probeHeaderProblems(header);
  }
  const expected = FIXED_HEADERS[kind]!;
  const problems: string[] = [];
  const missing = expected.filter((c) => !header.includes(c));
  const unexpected = header.filter((c) => !expected.includes(c));
  if (missing.length > 0) problems.push(`missing column(s): ${missing.join(", ")}`);
  if (unexpected.length > 0) {
    problems.push(`unexpected column(s): ${unexpected.join(", ")}`);
  }
  if (problems.length === 0 && header.join(",") !== expected.join(",")) {
    problems.push(
      `columns out of order: expected ${expected.join(", ")}; found ${header.join(", ")}`,
    );
  }
  return problems;
}

/** m, M_probe1..N (N >= 1, consecutively numbered), is_extrapolation. */
function probeHeaderProblems(header: string[]): string[] {
  const problems: string[] = [];
  if (header[0] !== "m") problems.push("first column must be 'm'");
  if (header[header.length - 1] !== "is_extrapolation") {
    problems.push("last column must be 'is_extrapolation'");
  }
  const middle = header.slice(1, -1);
  if (middle.length === 0) problems.push("missing column(s): M_probe1");
  middle.forEach((name, i) => {
    if (name !== `M_probe${i + 1}`) {
      problems.push(`column ${i + 2} must be 'M_probe${i + 1}', found '${name}'`);
    }
  });
  return problems;
}

export function probeColumns(header: string[]): string[] {
  return header.filter((h) => h.startsWith("M_probe"));
}
