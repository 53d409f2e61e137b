/** Undo/redo stack of layer diffs.
 *
 * Undo pops the last diff and reverts it; redo replays it.  Any new
 * stroke clears the redo branch, so the history is always a straight
 * line from the loaded document to the current one.
 */

import { PrimitiveDocument } from "./document";
import { LayerDiff, replayDiff, revertDiff } from "./tools";

export class History {
  private undoStack: LayerDiff[] = [];
  private redoStack: LayerDiff[] = [];

  push(diff: LayerDiff): void {
    this.undoStack.push(diff);
    this.redoStack = [];
  }

  canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  get depth(): number {
    return this.undoStack.length;
  }

  undo(doc: PrimitiveDocument): boolean {
    const diff = this.undoStack.pop();
    if (!diff) return false;
    revertDiff(doc, diff);
    this.redoStack.push(diff);
    return true;
  }

  redo(doc: PrimitiveDocument): boolean {
    const diff = this.redoStack.pop();
    if (!diff) return false;
    replayDiff(doc, diff);
    this.undoStack.push(diff);
    return true;
  }

  clear(): void {
    this.undoStack = [];
    this.redoStack = [];
  }
}
