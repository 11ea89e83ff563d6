export { ArtifactError, parseFitReport, parseSpectrumCsv } from "./artifacts.js";
export type { FitLine, FitReport, SpectrumData } from "./artifacts.js";
export { renderFigure } from "./figure.js";
export type { FigureInput, FigureScale, GuideLine, Marker, SeriesInput } from "./figure.js";
export { loadFigureInput, renderSpecFile } from "./render.js";
export type { FigureSpecDoc, SeriesSpecDoc } from "./render.js";
