import { describe, expect, it } from "vitest";

import { dirAttribute, isRTL, t } from "../src/i18n";

describe("t", () => {
  it("resolves each supported language", () => {
    expect(t("en", "action.assign")).toBe("Assign unit");
    expect(t("ku", "action.assign")).toBe("دیاریکردنی یەکە");
    expect(t("ar", "action.assign")).toBe("إسناد وحدة");
  });

  it("falls back to English for a missing key", () => {
    expect(t("ku", "state.nonexistent")).toBe("state.nonexistent");
  });
});

describe("direction", () => {
  it("marks Arabic-script languages as RTL", () => {
    expect(isRTL("ar")).toBe(true);
    expect(isRTL("ku")).toBe(true);
    expect(isRTL("en")).toBe(false);
    expect(dirAttribute("ar")).toBe("rtl");
    expect(dirAttribute("en")).toBe("ltr");
  });
});
