import { describe, expect, it } from "vitest";

import type { TagsetNode, TagsetTree } from "../src/api.js";
import { TagPicker } from "../src/picker.js";
import served from "./fixtures/tagset.json";

const tree = served as TagsetTree;

function allNodes(nodes: TagsetNode[]): TagsetNode[] {
  return nodes.flatMap((n) => [n, ...allNodes(n.children)]);
}

const servedLabels = new Set(allNodes(tree.categories).map((n) => n.label));
const servedLeaves = new Set(
  allNodes(tree.categories).filter((n) => n.children.length === 0).map((n) => n.label),
);

describe("picker soundness over the served tagset", () => {
  it("drilling every path can emit only served leaf labels", () => {
    const emitted: string[] = [];

    const walk = (path: string[], node: TagsetNode) => {
      const picker = new TagPicker(tree);
      picker.open();
      for (const step of path) {
        expect(picker.choose(step)).toEqual({ kind: "descended" });
      }
      const optionLabels = picker.options().map((o) => o.label);
      for (const label of optionLabels) {
        expect(servedLabels.has(label)).toBe(true);
      }
      const result = picker.choose(node.label);
      if (node.children.length === 0) {
        expect(result.kind).toBe("emitted");
        if (result.kind === "emitted") emitted.push(result.leafLabel);
      } else {
        expect(result.kind).toBe("descended");
        for (const child of node.children) walk([...path, node.label], child);
      }
    };

    for (const top of tree.categories) walk([], top);

    expect(emitted.length).toBeGreaterThan(0);
    for (const label of emitted) {
      expect(servedLeaves.has(label)).toBe(true);
    }
  });

  it("labels not at the drilled position are not choosable", () => {
    const picker = new TagPicker(tree);
    picker.open();
    expect(picker.choose("VF").kind).toBe("noop"); // level-3 label at top level
    picker.choose("N");
    expect(picker.choose("CL").kind).toBe("noop"); // other category's subtype
  });

  it("free-text style emission is unrepresentable", () => {
    const picker = new TagPicker(tree);
    picker.open();
    expect(picker.choose("NOTATAG")).toEqual({ kind: "noop" });
  });
});

describe("specific drills", () => {
  it("V then VM exposes exactly the three finiteness options", () => {
    const picker = new TagPicker(tree);
    picker.open();
    expect(picker.choose("V").kind).toBe("descended");
    expect(picker.choose("VM").kind).toBe("descended");
    expect(picker.options().map((o) => o.label)).toEqual(["VF", "VNF", "VNP"]);
    expect(picker.options()).toHaveLength(3);
  });

  it("JJ is immediately selectable at the top level", () => {
    const picker = new TagPicker(tree);
    picker.open();
    const result = picker.choose("JJ");
    expect(result).toEqual({ kind: "emitted", leafLabel: "JJ", convention: "JJ" });
    expect(picker.isOpen).toBe(false);
  });

  it("N exposes its noun subtypes", () => {
    const picker = new TagPicker(tree);
    picker.open();
    picker.choose("N");
    expect(picker.options().map((o) => o.label)).toEqual(["NN", "NNP", "NST"]);
  });

  it("preview shows the convention of the highlighted option", () => {
    const picker = new TagPicker(tree);
    picker.open();
    picker.choose("RP");
    picker.moveHighlight(1); // RPD -> CL
    expect(picker.preview()).toBe("RP__CL");
  });
});

describe("keyboard surface", () => {
  it("digits choose by position", () => {
    const picker = new TagPicker(tree);
    picker.open();
    expect(picker.handleKey("4").kind).toBe("descended"); // V
    expect(picker.breadcrumb()).toEqual(["V"]);
    expect(picker.handleKey("1").kind).toBe("descended"); // VM
    const result = picker.handleKey("2"); // VNF
    expect(result).toEqual({ kind: "emitted", leafLabel: "VNF", convention: "V__VM__VNF" });
  });

  it("arrows move the highlight and Enter chooses it", () => {
    const picker = new TagPicker(tree);
    picker.open();
    picker.handleKey("ArrowDown");
    picker.handleKey("ArrowDown");
    expect(picker.handleKey("Enter").kind).toBe("descended"); // DM
    expect(picker.breadcrumb()).toEqual(["DM"]);
  });

  it("Escape goes up one level, then closes", () => {
    const picker = new TagPicker(tree);
    picker.open();
    picker.choose("V");
    picker.choose("VM");
    expect(picker.handleKey("Escape").kind).toBe("descended");
    expect(picker.breadcrumb()).toEqual(["V"]);
    picker.handleKey("Escape");
    expect(picker.handleKey("Escape")).toEqual({ kind: "closed" });
    expect(picker.isOpen).toBe(false);
  });

  it("highlight wraps at the edges", () => {
    const picker = new TagPicker(tree);
    picker.open();
    picker.moveHighlight(-1);
    expect(picker.highlight).toBe(tree.categories.length - 1);
    picker.moveHighlight(1);
    expect(picker.highlight).toBe(0);
  });
});
