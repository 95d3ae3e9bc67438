export { ApiClient, ApiError } from './api';
export { initialState, renderApp, ReporterApp } from './app';
export type { AppState, ChatEntry, Handlers } from './app';
export { MAX_CARDS, renderSuggestionCards } from './cards';
export { inscribedEllipse, renderCardImage } from './overlay';
export type { Bounds, Ellipse } from './overlay';
export {
  renderCapturePanel,
  renderQuickActions,
  renderStepsPanel,
  renderTipsPanel,
} from './panels';
export type { AssetResolver } from './panels';
export {
  MAX_PACKAGE_BYTES,
  renderUploadPanel,
  renderValidationReport,
  validatePackageFile,
} from './upload';
export type {
  AppSummary,
  DialogueResponse,
  ReportedStep,
  SuggestionCard,
  UploadIssue,
  ValidationReport,
} from './types';
