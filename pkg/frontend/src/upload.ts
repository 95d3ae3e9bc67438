import type { ValidationReport } from './types';

export const MAX_PACKAGE_BYTES = 50 * 1024 * 1024;

/** Client-side package check mirroring the server limit. Null when acceptable. */
export function validatePackageFile(file: File, maxBytes: number = MAX_PACKAGE_BYTES): string | null {
  if (file.size === 0) {
    return `File "${file.name}" is empty.`;
  }
  if (file.size > maxBytes) {
    const maxMb = Math.floor(maxBytes / (1024 * 1024));
    return `File "${file.name}" exceeds the ${maxMb}MB upload limit.`;
  }
  return null;
}

/**
 * The validation outcome shown inline in the developer panel: a one-line
 * summary on success, or one list entry per problem on failure.
 */
export function renderValidationReport(container: HTMLElement, report: ValidationReport): void {
  container.innerHTML = '';
  if (report.ok) {
    const summary = document.createElement('div');
    summary.setAttribute('data-testid', 'upload-ok');
    summary.textContent =
      `Published ${report.app_name} ${report.app_version}: ` +
      `${report.trace_count} traces, ${report.event_count} events.`;
    container.appendChild(summary);
    return;
  }

  const heading = document.createElement('div');
  heading.setAttribute('data-testid', 'upload-failed');
  heading.textContent = 'The package was rejected; nothing was installed.';
  container.appendChild(heading);

  const list = document.createElement('ul');
  list.setAttribute('data-testid', 'upload-error-list');
  for (const issue of report.errors) {
    const item = document.createElement('li');
    item.setAttribute('data-testid', 'upload-error');
    const where = issue.file
      ? issue.sequence != null
        ? `${issue.file} (event ${issue.sequence})`
        : issue.file
      : 'package';
    item.textContent = `${where}: ${issue.message}`;
    list.appendChild(item);
  }
  container.appendChild(list);
}

export interface UploadPanelOptions {
  onUpload: (zip: File, icon: File | null) => void;
  maxBytes?: number;
  disabled?: boolean;
}

/**
 * The developer panel: pick a trace ZIP (and optionally an icon), validate
 * the size locally, and hand the files to `onUpload`. The caller posts them
 * and feeds the resulting report back through renderValidationReport.
 */
export function renderUploadPanel(container: HTMLElement, options: UploadPanelOptions): void {
  container.innerHTML = '';

  const zipInput = document.createElement('input');
  zipInput.type = 'file';
  zipInput.accept = '.zip,application/zip';
  zipInput.setAttribute('data-testid', 'upload-zip');
  container.appendChild(zipInput);

  const iconInput = document.createElement('input');
  iconInput.type = 'file';
  iconInput.accept = 'image/png';
  iconInput.setAttribute('data-testid', 'upload-icon');
  container.appendChild(iconInput);

  const message = document.createElement('div');
  message.setAttribute('data-testid', 'upload-message');
  container.appendChild(message);

  const submit = document.createElement('button');
  submit.type = 'button';
  submit.setAttribute('data-testid', 'upload-submit');
  submit.textContent = 'Upload package';
  submit.disabled = options.disabled ?? false;
  submit.onclick = () => {
    const zip = zipInput.files?.[0];
    if (!zip) {
      message.textContent = 'Choose a trace package first.';
      return;
    }
    const problem = validatePackageFile(zip, options.maxBytes ?? MAX_PACKAGE_BYTES);
    if (problem) {
      message.textContent = problem;
      return;
    }
    message.textContent = '';
    options.onUpload(zip, iconInput.files?.[0] ?? null);
  };
  container.appendChild(submit);
}
