export { CsvError, Table, column, parseCsv } from "./csv";
export { FigureError, FigureSpec, renderFigure } from "./figures";
export { SlopeFit, fitLogLogSlope } from "./fit";
export { FIGURE_KINDS, FigureKind, headerProblems, isFigureKind, probeColumns } from "./schema";
export { STYLE_VERSION } from "./svg";
