import type { Prediction } from "../src/api.js";

/** Recorded /api/predict response for the worked-example patient: four
 * rules vote 2-2, the trusted rules disagree, reliability is low. */
export const examplePatient: Prediction = {
  rules: [
    { text: "IF age>80, nc>1, THEN 1, ELSE 0", output: 1, prc: 0.66, weight: 0.66 },
    { text: "IF karnofsky<=40, THEN 1, ELSE 0", output: 0, prc: 0.42, weight: 0.42 },
    { text: "IF mean_bp>107, THEN 1, ELSE 0", output: 0, prc: 0.54, weight: 0.54 },
    { text: "IF creatinine>2.5, THEN 1, ELSE 0", output: 1, prc: 0.95, weight: 0.95 },
  ],
  raw_score: 0.6264591439688716,
  probability: 0.58,
  reliability: 0.325,
  unanimous: false,
  scheme: "personalized",
};

/** Same patient after a hypothetical what-if edit: outputs fixed, PRCs
 * shifted. The exact numbers are arbitrary; only deltas matter. */
export const examplePatientEdited: Prediction = {
  rules: [
    { text: "IF age>80, nc>1, THEN 1, ELSE 0", output: 0, prc: 0.61, weight: 0.61 },
    { text: "IF karnofsky<=40, THEN 1, ELSE 0", output: 0, prc: 0.42, weight: 0.42 },
    { text: "IF mean_bp>107, THEN 1, ELSE 0", output: 0, prc: 0.58, weight: 0.58 },
    { text: "IF creatinine>2.5, THEN 1, ELSE 0", output: 1, prc: 0.9, weight: 0.9 },
  ],
  raw_score: 0.6,
  probability: 0.55,
  reliability: 0.41,
  unanimous: false,
  scheme: "personalized",
};

/** Deliberately inconsistent numbers: the probability and reliability do
 * not follow from the rules. A compliant client renders them verbatim
 * because it never recomputes scores. */
export const inconsistentFixture: Prediction = {
  rules: [
    { text: "IF x>1, THEN 1, ELSE 0", output: 1, prc: 0.5, weight: 0.5 },
  ],
  raw_score: 0.123,
  probability: 0.777,
  reliability: 0.999,
  unanimous: false, // contradicts the single positive vote on purpose
  scheme: "weighted",
};
