// Lightweight syntax highlighting for the textual block notation.
// Produces escaped HTML with span classes; no external dependencies.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

const KEYWORDS = /^(end|else|forever|define)\b/;

export function highlightLine(line: string): string {
  const trimmed = line.trimStart();
  const indent = line.slice(0, line.length - trimmed.length);
  if (trimmed.startsWith('//')) {
    return `${indent}<span class="tok-comment">${escapeHtml(trimmed)}</span>`;
  }
  let rest = trimmed;
  let prefix = '';
  const keyword = rest.match(KEYWORDS);
  if (keyword) {
    prefix = `<span class="tok-keyword">${keyword[0]}</span>`;
    rest = rest.slice(keyword[0].length);
  }
  return indent + highlightTokens(prefix, rest);
}

function highlightTokens(prefix: string, text: string): string {
  let out = prefix;
  let i = 0;
  while (i < text.length) {
    const ch = text[i];
    if (ch === '(') {
      const end = matchBracket(text, i, '(', ')');
      out += `<span class="tok-value">(${escapeHtml(text.slice(i + 1, end))})</span>`;
      i = end + 1;
    } else if (ch === '[') {
      const end = matchBracket(text, i, '[', ']');
      const inner = text.slice(i + 1, end);
      const cls = inner.endsWith(' v') ? 'tok-dropdown' : 'tok-string';
      out += `<span class="${cls}">[${escapeHtml(inner)}]</span>`;
      i = end + 1;
    } else if (ch === '<' && i + 1 < text.length && text[i + 1] !== ' ') {
      const end = matchBracket(text, i, '<', '>');
      out += `<span class="tok-bool">&lt;${escapeHtml(text.slice(i + 1, end))}&gt;</span>`;
      i = end + 1;
    } else {
      out += escapeHtml(ch);
      i += 1;
    }
  }
  return out;
}

function matchBracket(text: string, start: number, open: string, close: string): number {
  let depth = 0;
  for (let i = start; i < text.length; i += 1) {
    if (text[i] === open) depth += 1;
    else if (text[i] === close) {
      depth -= 1;
      if (depth === 0) return i;
    }
  }
  return text.length;
}

export function highlightCode(code: string): string {
  return code.split('\n').map(highlightLine).join('\n');
}
