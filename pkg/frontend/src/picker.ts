/**
 * Drill-down tag picker over the served category tree.
 *
 * The picker walks the hierarchy one level at a time (top-level category,
 * then subtype, then the level-2 subtype where one exists) and can emit
 * only leaf labels that exist in the tree it was given — there is no
 * free-text entry, so an invalid tag is unrepresentable. The full
 * convention string next to each option is display-only; the server
 * derives the authoritative one from the emitted leaf label.
 */

import type { TagsetNode, TagsetTree } from "./api.js";

export type PickerResult =
  | { kind: "descended" }
  | { kind: "emitted"; leafLabel: string; convention: string }
  | { kind: "closed" }
  | { kind: "noop" };

export class TagPicker {
  private path: TagsetNode[] = [];
  highlight = 0;
  isOpen = false;

  constructor(private readonly tree: TagsetTree) {}

  open(): void {
    this.isOpen = true;
    this.path = [];
    this.highlight = 0;
  }

  close(): void {
    this.isOpen = false;
    this.path = [];
    this.highlight = 0;
  }

  /** Options at the current drill position, in served order. */
  options(): TagsetNode[] {
    const parent = this.path[this.path.length - 1];
    return (parent ? parent.children : this.tree.categories).slice();
  }

  breadcrumb(): string[] {
    return this.path.map((n) => n.label);
  }

  /** Convention of the highlighted option (read-only preview). */
  preview(): string | null {
    const option = this.options()[this.highlight];
    return option ? option.convention : null;
  }

  moveHighlight(delta: number): void {
    const n = this.options().length;
    if (n === 0) return;
    this.highlight = (this.highlight + delta + n) % n;
  }

  /**
   * Choose an option by label: descend into a category with subtypes,
   * emit a leaf. Labels not present at this position are ignored.
   */
  choose(label: string): PickerResult {
    const node = this.options().find((o) => o.label === label);
    if (!node) return { kind: "noop" };
    if (node.children.length > 0) {
      this.path.push(node);
      this.highlight = 0;
      return { kind: "descended" };
    }
    const result: PickerResult = {
      kind: "emitted",
      leafLabel: node.label,
      convention: node.convention,
    };
    this.close();
    return result;
  }

  chooseHighlighted(): PickerResult {
    const option = this.options()[this.highlight];
    return option ? this.choose(option.label) : { kind: "noop" };
  }

  /** One level back up; closes when already at the top. */
  up(): PickerResult {
    if (this.path.length > 0) {
      this.path.pop();
      this.highlight = 0;
      return { kind: "descended" };
    }
    this.close();
    return { kind: "closed" };
  }

  /** Keyboard surface: arrows/jk move, digits jump, Enter chooses, Esc backs out. */
  handleKey(key: string): PickerResult {
    switch (key) {
      case "ArrowDown":
      case "j":
        this.moveHighlight(1);
        return { kind: "noop" };
      case "ArrowUp":
      case "k":
        this.moveHighlight(-1);
        return { kind: "noop" };
      case "Enter":
        return this.chooseHighlighted();
      case "Escape":
      case "Backspace":
        return this.up();
      default: {
        if (/^[1-9]$/.test(key)) {
          const option = this.options()[Number(key) - 1];
          return option ? this.choose(option.label) : { kind: "noop" };
        }
        return { kind: "noop" };
      }
    }
  }
}
