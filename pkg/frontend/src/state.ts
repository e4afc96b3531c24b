/** Client view state. The server session owns the audit state; this store
 * mirrors it plus purely presentational toggles. The active subgroup list is
 * shared by both tabs, so switching tabs never changes it.
 */

import type { SessionState, SubgroupInfo } from "./types.js";

export type Tab = "SubgroupExploration" | "FairnessCompass";

export interface ViewState {
  sessionId: string;
  collapsedSidebar: boolean;
  activeTab: Tab;
  paneDividers: { sidebar: number; compass: number; exploration: number };
  selectedMetrics: string[];
  activeSubgroups: SubgroupInfo[];
  pinnedSubgroupId: string | null;
  hoveredSubgroupId: string | null;
  treePath: [string, string][];
  selectedNodeId: string | null;
  selectedDefinition: string | null;
  favourableClass: 0 | 1;
  sensitiveAttribute: string | null;
  legitimateAttributes: string[];
  errorMessage: string | null;
}

export function initialViewState(sessionId: string): ViewState {
  return {
    sessionId,
    collapsedSidebar: false,
    activeTab: "SubgroupExploration",
    paneDividers: { sidebar: 0.25, compass: 0.5, exploration: 0.6 },
    selectedMetrics: ["accuracy", "precision", "recall"],
    activeSubgroups: [],
    pinnedSubgroupId: null,
    hoveredSubgroupId: null,
    treePath: [],
    selectedNodeId: null,
    selectedDefinition: null,
    favourableClass: 1,
    sensitiveAttribute: null,
    legitimateAttributes: [],
    errorMessage: null,
  };
}

export function syncFromSession(state: ViewState, session: SessionState): ViewState {
  return {
    ...state,
    activeSubgroups: session.active_subgroups,
    pinnedSubgroupId: session.pinned_subgroup,
    treePath: session.tree_path,
    selectedDefinition: session.selected_definition,
  };
}

export function switchTab(state: ViewState, tab: Tab): ViewState {
  // Only the tab flag changes: groups, pins, selections all survive.
  return { ...state, activeTab: tab };
}

export function toggleSidebar(state: ViewState): ViewState {
  return { ...state, collapsedSidebar: !state.collapsedSidebar };
}

export function setDivider(
  state: ViewState,
  pane: keyof ViewState["paneDividers"],
  position: number,
): ViewState {
  const clamped = Math.min(0.9, Math.max(0.1, position));
  return { ...state, paneDividers: { ...state.paneDividers, [pane]: clamped } };
}
