// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import {
  buildViewModel,
  DashboardViewModel,
  emptyViewModel,
  FeedsPayload,
  markStale,
} from "../src/model.js";
import {
  clearSetpointErrors,
  Handlers,
  renderDashboard,
  showSetpointError,
} from "../src/render.js";

const FEEDS: FeedsPayload = {
  channel: { id: 1, name: "greenhouse" },
  feeds: [
    { entry_id: 1, created_at: "2022-05-25T10:31:00Z", field3: "-2.54", field3_valid: false },
    { entry_id: 2, created_at: "2022-05-25T11:05:00Z", field1: "33", field2: "50" },
    { entry_id: 3, created_at: "2022-05-25T11:06:00Z", field4: "89", field5: "31.94" },
  ],
};

function sampleVm(): DashboardViewModel {
  return buildViewModel(
    FEEDS,
    {
      actuators: {
        cooling: { on: true, override: "on", last_transition: null },
        dosing: { on: false, override: null, last_transition: null },
      },
      alerts: [{ parameter: "humidity", reason: "HumidityLow" }],
    },
    { ph_low: 6.5, ph_high: 8, air_low: 26, air_high: 29 },
    60,
  );
}

let root: HTMLElement;
let calls: string[];
let handlers: Handlers;

beforeEach(() => {
  document.body.innerHTML = '<main id="app"></main>';
  root = document.getElementById("app")!;
  calls = [];
  handlers = {
    submitSetpoints: (values) => calls.push(`setpoints ${JSON.stringify(values)}`),
    overrideActuator: (name, mode) => calls.push(`override ${name} ${mode}`),
  };
});

describe("tiles", () => {
  it("renders one tile per field with truncated display text", () => {
    renderDashboard(root, sampleVm(), handlers);
    expect(root.querySelectorAll(".tile")).toHaveLength(5);
    expect(root.querySelector("#tile-air .tile-value")!.textContent).toBe("33.00 °C");
    expect(root.querySelector("#tile-humidity .tile-value")!.textContent).toBe("50.0 %");
    expect(root.querySelector("#tile-water .tile-value")!.textContent).toBe("31.94 °C");
  });

  it("badges invalid values", () => {
    renderDashboard(root, sampleVm(), handlers);
    const ph = root.querySelector("#tile-ph")!;
    expect(ph.querySelector(".badge-invalid")!.textContent).toBe("invalid");
    expect(root.querySelector("#tile-water .badge-invalid")).toBeNull();
  });

  it("shows placeholders for an empty channel", () => {
    renderDashboard(root, emptyViewModel(), handlers);
    expect(root.querySelector("#tile-ph .tile-value")!.textContent).toBe("no data");
  });
});

describe("charts", () => {
  it("shades the ideal band behind the trace", () => {
    renderDashboard(root, sampleVm(), handlers);
    const air = root.querySelector("#chart-air")!;
    expect(air.querySelector("rect.ideal-band")).not.toBeNull();
    expect(air.querySelector("polyline.trace")).not.toBeNull();
    // No thresholds for light, so no band to shade.
    expect(root.querySelector("#chart-light rect.ideal-band")).toBeNull();
  });

  it("marks invalid points", () => {
    renderDashboard(root, sampleVm(), handlers);
    expect(root.querySelectorAll("#chart-ph circle.invalid-point")).toHaveLength(1);
  });
});

describe("actuator panel", () => {
  it("distinguishes manual from automatic state", () => {
    renderDashboard(root, sampleVm(), handlers);
    const cooling = root.querySelector("#actuator-cooling")!;
    expect(cooling.querySelector(".state")!.textContent).toBe("On");
    expect(cooling.querySelector(".badge-manual")).not.toBeNull();
    const dosing = root.querySelector("#actuator-dosing")!;
    expect(dosing.querySelector(".badge-manual")).toBeNull();
  });

  it("wires the override buttons", () => {
    renderDashboard(root, sampleVm(), handlers);
    const button = root.querySelector<HTMLButtonElement>(
      '#actuator-cooling button[data-mode="auto"]',
    )!;
    button.click();
    expect(calls).toEqual(["override cooling auto"]);
  });
});

describe("setpoints form", () => {
  it("prefills the active thresholds and submits numbers", () => {
    renderDashboard(root, sampleVm(), handlers);
    const phLow = root.querySelector<HTMLInputElement>('input[name="ph_low"]')!;
    expect(phLow.value).toBe("6.5");
    phLow.value = "6.8";
    root.querySelector("form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    expect(calls).toHaveLength(1);
    expect(JSON.parse(calls[0]!.replace("setpoints ", ""))).toMatchObject({
      ph_low: 6.8,
      ph_high: 8,
    });
  });

  it("shows a server rejection inline at the named field", () => {
    renderDashboard(root, sampleVm(), handlers);
    showSetpointError(root, "ph_low", "ph_low must be below ph_high");
    expect(root.querySelector("#error-ph_low")!.textContent).toBe(
      "ph_low must be below ph_high",
    );
    clearSetpointErrors(root);
    expect(root.querySelector("#error-ph_low")!.textContent).toBe("");
  });

  it("falls back to the form-level slot when no field is named", () => {
    renderDashboard(root, sampleVm(), handlers);
    showSetpointError(root, null, "write API key required");
    expect(root.querySelector("#setpoints-error")!.textContent).toBe(
      "write API key required",
    );
  });
});

describe("status surfaces", () => {
  it("lists alerts newest first", () => {
    renderDashboard(root, sampleVm(), handlers);
    expect(root.querySelector("#alert-feed li")!.textContent).toBe(
      "humidity: HumidityLow",
    );
  });

  it("raises the stale banner with the last success time", () => {
    renderDashboard(root, markStale(sampleVm(), "2022-05-25T11:06:00Z"), handlers);
    expect(root.querySelector("#stale-banner")!.textContent).toContain(
      "2022-05-25T11:06:00Z",
    );
  });
});
