#pragma once

// JSON schemas for the machine-readable outputs, embedded so that
// `--json-schema` works without locating the installed schema files.  The
// copies under schemas/ must stay byte-identical; an integration test
// compares them against this header via the flag.

namespace cli {

inline constexpr const char* kFitSchema = R"schema({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "fit output",
  "type": "object",
  "properties": {
    "command": {"enum": ["fit"]},
    "input": {"type": "string"},
    "target": {"type": "string"},
    "n": {"type": "integer"},
    "p": {"type": "integer"},
    "m_max": {"type": "integer"},
    "components": {"type": "integer"},
    "truncated_at": {"type": ["integer", "null"]},
    "terms": {"type": "array", "items": {"type": "string"}},
    "path": {
      "type": "array",
      "items": {
        "type": "object",
        "properties": {
          "m": {"type": "integer"},
          "intercept": {"type": "number"},
          "coefficients": {"type": "array", "items": {"type": "number"}},
          "rss": {"type": "number"},
          "fitted": {"type": "array", "items": {"type": "number"}}
        },
        "required": ["m", "intercept", "coefficients", "rss", "fitted"],
        "additionalProperties": false
      }
    }
  },
  "required": ["command", "input", "target", "n", "p", "m_max", "components",
               "truncated_at", "terms", "path"],
  "additionalProperties": false
}
)schema";

inline constexpr const char* kDofSchema = R"schema({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "dof output",
  "type": "object",
  "properties": {
    "command": {"enum": ["dof"]},
    "input": {"type": "string"},
    "target": {"type": "string"},
    "engine": {"enum": ["lanczos", "krylov", "both", "naive"]},
    "n": {"type": "integer"},
    "p": {"type": "integer"},
    "m_max": {"type": "integer"},
    "rows": {
      "type": "array",
      "items": {
        "type": "object",
        "properties": {
          "m": {"type": "integer"},
          "dof": {"type": "number"},
          "lanczos": {"type": "number"},
          "krylov": {"type": "number"}
        },
        "required": ["m"],
        "additionalProperties": false
      }
    },
    "max_disagreement": {"type": ["number", "null"]},
    "truncated_at": {"type": ["integer", "null"]},
    "reason": {"enum": ["none", "degenerate-component", "negative-dof", "singular-basis"]}
  },
  "required": ["command", "input", "target", "engine", "n", "p", "m_max", "rows",
               "truncated_at", "reason"],
  "additionalProperties": false
}
)schema";

inline constexpr const char* kSelectSchema = R"schema({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "select output",
  "type": "object",
  "properties": {
    "command": {"enum": ["select"]},
    "input": {"type": "string"},
    "target": {"type": "string"},
    "method": {"enum": ["cv", "bic-lanczos", "bic-krylov", "bic-naive"]},
    "n": {"type": "integer"},
    "p": {"type": "integer"},
    "m_max": {"type": "integer"},
    "folds": {"type": ["integer", "null"]},
    "seed": {"type": ["integer", "null"]},
    "criterion": {"enum": ["cv-mse", "bic"]},
    "chosen_m": {"type": "integer"},
    "chosen_dof": {"type": ["number", "null"]},
    "sigma_hat": {"type": ["number", "null"]},
    "rows": {
      "type": "array",
      "items": {
        "type": "object",
        "properties": {
          "m": {"type": "integer"},
          "rss": {"type": "number"},
          "dof": {"type": "number"},
          "sigma2_hat": {"type": ["number", "null"]},
          "criterion": {"type": ["number", "null"]},
          "valid": {"type": "boolean"},
          "holdout_mse": {"type": "number"}
        },
        "required": ["m", "rss", "dof", "sigma2_hat", "criterion", "valid"],
        "additionalProperties": false
      }
    },
    "holdout_mse": {"type": ["number", "null"]},
    "truncated_at": {"type": ["integer", "null"]},
    "reason": {"enum": ["none", "degenerate-component", "negative-dof", "singular-basis"]}
  },
  "required": ["command", "input", "target", "method", "n", "p", "m_max", "folds",
               "seed", "criterion", "chosen_m", "chosen_dof", "sigma_hat", "rows",
               "holdout_mse", "truncated_at", "reason"],
  "additionalProperties": false
}
)schema";

inline constexpr const char* kCompareSchema = R"schema({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "compare output",
  "type": "object",
  "properties": {
    "command": {"enum": ["compare"]},
    "input": {"type": "string"},
    "target": {"type": "string"},
    "reps": {"type": "integer"},
    "train_size": {"type": "integer"},
    "test_size": {"type": "integer"},
    "folds": {"type": "integer"},
    "m_max": {"type": "integer"},
    "seed": {"type": "integer"},
    "lambdas": {"type": "array", "items": {"type": "number"}},
    "methods": {
      "type": "array",
      "items": {
        "type": "object",
        "properties": {
          "method": {"enum": ["pls", "pcr", "ridge"]},
          "median_test_mse": {"type": ["number", "null"]},
          "median_chosen_m": {"type": ["number", "null"]},
          "median_chosen_dof": {"type": ["number", "null"]},
          "median_lambda": {"type": ["number", "null"]}
        },
        "required": ["method", "median_test_mse", "median_chosen_m", "median_chosen_dof"],
        "additionalProperties": false
      }
    },
    "files": {
      "type": "object",
      "properties": {
        "metrics": {"type": "string"},
        "curves": {"type": "string"}
      },
      "required": ["metrics", "curves"],
      "additionalProperties": false
    }
  },
  "required": ["command", "input", "target", "reps", "train_size", "test_size",
               "folds", "m_max", "seed", "lambdas", "methods", "files"],
  "additionalProperties": false
}
)schema";

inline constexpr const char* kSimulateSchema = R"schema({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "simulate output",
  "type": "object",
  "properties": {
    "command": {"enum": ["simulate"]},
    "config": {
      "type": "object",
      "properties": {
        "d_values": {"type": "array", "items": {"type": "integer"}},
        "n_train": {"type": "integer"},
        "n_test": {"type": "integer"},
        "snr": {"type": "number"},
        "reps": {"type": "integer"},
        "seed": {"type": "integer"},
        "m_max": {"type": "integer"},
        "cv_folds": {"type": "integer"},
        "base_rows": {"type": "integer"},
        "base_dims": {"type": "integer"}
      },
      "required": ["d_values", "n_train", "n_test", "snr", "reps", "seed", "m_max",
                   "cv_folds", "base_rows", "base_dims"],
      "additionalProperties": false
    },
    "cells": {
      "type": "array",
      "items": {
        "type": "object",
        "properties": {
          "d": {"type": "integer"},
          "rep": {"type": "integer"},
          "method": {"enum": ["cv", "bic-lanczos", "bic-krylov", "bic-naive"]},
          "chosen_m": {"type": "integer"},
          "chosen_dof": {"type": ["number", "null"]},
          "sigma_ratio": {"type": ["number", "null"]},
          "norm_test_error": {"type": ["number", "null"]}
        },
        "required": ["d", "rep", "method", "chosen_m", "chosen_dof", "sigma_ratio",
                     "norm_test_error"],
        "additionalProperties": false
      }
    },
    "medians": {
      "type": "array",
      "items": {
        "type": "object",
        "properties": {
          "d": {"type": "integer"},
          "method": {"enum": ["cv", "bic-lanczos", "bic-krylov", "bic-naive"]},
          "norm_test_error": {"type": ["number", "null"]},
          "chosen_m": {"type": ["number", "null"]},
          "chosen_dof": {"type": ["number", "null"]},
          "sigma_ratio": {"type": ["number", "null"]}
        },
        "required": ["d", "method", "norm_test_error", "chosen_m", "chosen_dof",
                     "sigma_ratio"],
        "additionalProperties": false
      }
    },
    "files": {
      "type": "object",
      "properties": {
        "cells": {"type": "string"}
      },
      "required": ["cells"],
      "additionalProperties": false
    }
  },
  "required": ["command", "config", "cells", "medians", "files"],
  "additionalProperties": false
}
)schema";

}  // namespace cli
