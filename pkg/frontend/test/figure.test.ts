import assert from "node:assert/strict";
import * as fs from "node:fs";
import { test } from "node:test";

import { fixturePath } from "./helpers";

import { parseResultCsv, REQUIRED_COLUMNS } from "../src/csv";
import { buildSeries, EmptyPlotError, renderSvg } from "../src/figure";

const FIXTURE = fixturePath("headline_n201.csv");
const fixtureRows = () => parseResultCsv(fs.readFileSync(FIXTURE, "utf8"));

test("fixture yields nine series with the expected legend labels", () => {
  const series = buildSeries(fixtureRows(), { kind: "excess_variance" });
  assert.equal(series.length, 9);
  assert.deepEqual(
    series.map((s) => s.label),
    ["LLN", "ULN", "arshinhN", "Student's T", "Lap", "N",
     "trim non-priv", "global sens", "lower bound"],
  );
});

test("plotted values equal CSV values exactly", () => {
  const rows = fixtureRows();
  const series = buildSeries(rows, { kind: "excess_variance" });
  const byAlg = new Map(series.map((s) => [s.algorithm, s]));
  for (const row of rows) {
    const point = byAlg.get(row.algorithm)!.points.find((p) => p.x === row.m)!;
    assert.equal(point.y, row.excessVar); // identity, no numeric alteration
  }
});

test("svg contains all nine legend entries and a marker per row", () => {
  const rows = fixtureRows();
  const svg = renderSvg(rows, { kind: "excess_variance" });
  for (const label of ["LLN", "ULN", "arshinhN", "Student&apos;s T".replace("&apos;", "'"),
                       "Lap", ">N<", "trim non-priv", "global sens", "lower bound"]) {
    assert.ok(svg.includes(label), `legend label ${label} missing`);
  }
  assert.equal((svg.match(/class="legend-label"/g) ?? []).length, 9);
  const markers = (svg.match(/<circle /g) ?? []).length + (svg.match(/data-clipped/g) ?? []).length;
  assert.equal(markers, rows.length);
});

test("rendering is deterministic", () => {
  const rows = fixtureRows();
  const a = renderSvg(rows, { kind: "excess_variance" });
  const b = renderSvg(rows, { kind: "excess_variance" });
  assert.equal(a, b);
});

test("nonpositive cells are clipped and marked on the log axis", () => {
  const header = REQUIRED_COLUMNS.join(",");
  const text = [
    header,
    "lln,100,1.0,1,0.5,0.2,1.0,-0.5,0.01,100,7",
    "lln,100,1.0,2,0.5,0.2,1.0,2.0,0.01,100,7",
  ].join("\n");
  const rows = parseResultCsv(text);
  const series = buildSeries(rows, { kind: "excess_variance" });
  assert.equal(series[0].points[0].clipped, true);
  assert.equal(series[0].points[0].y, -0.5); // data value untouched
  assert.equal(series[0].points[1].clipped, false);
  const svg = renderSvg(rows, { kind: "excess_variance" });
  assert.equal((svg.match(/data-clipped/g) ?? []).length, 1);
  assert.ok(svg.includes("clipped to 0.001"));
});

test("trim-variance kind uses a linear axis and no clipping", () => {
  const header = REQUIRED_COLUMNS.join(",");
  const text = [
    header,
    "trim_nonprivate,100,1.0,1,,,,-0.25,0.01,100,7",
    "trim_nonprivate,100,1.0,5,,,,0.5,0.01,100,7",
  ].join("\n");
  const rows = parseResultCsv(text);
  const series = buildSeries(rows, { kind: "trim_variance" });
  assert.equal(series[0].points.every((p) => !p.clipped), true);
  const svg = renderSvg(rows, { kind: "trim_variance" });
  assert.ok(!svg.includes("data-clipped"));
  assert.ok(!svg.includes("log scale"));
});

test("fraction axis divides m by n", () => {
  const series = buildSeries(fixtureRows(), { kind: "excess_variance", xAxis: "fraction" });
  const lln = series.find((s) => s.algorithm === "lln")!;
  assert.ok(lln.points.every((p) => p.x > 0 && p.x < 0.5));
});

test("header-only input is an empty-plot error", () => {
  const rows = parseResultCsv(REQUIRED_COLUMNS.join(",") + "\n");
  assert.throws(() => renderSvg(rows, { kind: "excess_variance" }), EmptyPlotError);
});
