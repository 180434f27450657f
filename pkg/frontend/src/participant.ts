import { ApiError, ParticipantApi } from "./api.js";
import type { OpenResult, ParticipantListing } from "./types.js";
import { renderParticipant } from "./views.js";

export interface ParticipantState {
  listing: ParticipantListing | null;
  openedByEnv: Map<number, Set<string>>;
  currentDoc: { name: string; body: string } | null;
  notice: string | null;
  complete: boolean;
  error: string | null;
}

/** Drives the participant file explorer; knows nothing beyond names and text. */
export class ParticipantSession {
  readonly state: ParticipantState = {
    listing: null,
    openedByEnv: new Map(),
    currentDoc: null,
    notice: null,
    complete: false,
    error: null,
  };

  constructor(private readonly api: ParticipantApi) {}

  private openedIn(envIndex: number): Set<string> {
    let opened = this.state.openedByEnv.get(envIndex);
    if (!opened) {
      opened = new Set();
      this.state.openedByEnv.set(envIndex, opened);
    }
    return opened;
  }

  async refresh(): Promise<void> {
    const listing = await this.api.listFiles();
    const previous = this.state.listing;
    if (previous && listing.env_index !== previous.env_index) {
      this.state.notice = "This folder was replaced with a new one.";
      this.state.currentDoc = null;
    }
    this.state.listing = listing;
    if (listing.env_status === "complete") this.state.complete = true;
  }

  async open(name: string): Promise<OpenResult> {
    try {
      const result = await this.api.open(name);
      this.state.currentDoc = { name, body: result.body };
      this.state.error = null;
      if (this.state.listing) this.openedIn(this.state.listing.env_index).add(name);
      if (result.exercise_complete) {
        this.state.complete = true;
        this.state.notice = "This session has ended.";
      } else if (result.finalized) {
        // The follow-up folder is already provisioned; pick it up now.
        await this.refresh();
      }
      return result;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // Folder rotated under us or the session ended; resync.
        await this.refresh();
        this.state.error = null;
        throw err;
      }
      this.state.error = err instanceof Error ? err.message : String(err);
      throw err;
    }
  }

  /** First document in the current folder not yet opened, if any. */
  nextUnopened(): string | null {
    const listing = this.state.listing;
    if (!listing) return null;
    const opened = this.openedIn(listing.env_index);
    return listing.files.find((name) => !opened.has(name)) ?? null;
  }

  render(): string {
    const envIndex = this.state.listing?.env_index;
    return renderParticipant({
      listing: this.state.listing,
      openedNames: envIndex === undefined ? new Set() : this.openedIn(envIndex),
      currentDoc: this.state.currentDoc,
      notice: this.state.notice,
      complete: this.state.complete,
      error: this.state.error,
    });
  }
}
