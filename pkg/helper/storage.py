import json
import logging
from pathlib import Path

import jsonschema
import numpy as np

from config import Config
from reach.errors import MdpFormatError, ReachError
from reach.gridworld import GridSpec
from reach.mdp import FiniteMdp, as_labels

LABEL_NAMES = ("l", "g", "l1", "l2")

MDP_SCHEMA = {
    "type": "object",
    "required": ["num_states", "num_actions", "next", "labels"],
    "additionalProperties": False,
    "properties": {
        "num_states": {"type": "integer", "minimum": 1},
        "num_actions": {"type": "integer", "minimum": 1},
        "next": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "labels": {
            "type": "object",
            "additionalProperties": False,
            "properties": {name: {"type": "array", "items": {"type": "number"}} for name in LABEL_NAMES},
        },
    },
}

_BOX = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}
_RANGE = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

GRID_SCHEMA = {
    "type": "object",
    "required": ["task", "x_range", "y_range", "cells_x", "cells_y", "reward_boxes", "penalty_boxes"],
    "additionalProperties": False,
    "properties": {
        "task": {"enum": ["ra", "raa", "r", "rr"]},
        "x_range": _RANGE,
        "y_range": _RANGE,
        "cells_x": {"type": "integer", "minimum": 1},
        "cells_y": {"type": "integer", "minimum": 1},
        "reward_boxes": {"type": "array", "items": _BOX},
        "penalty_boxes": {"type": "array", "items": _BOX},
        "boundary_mode": {"enum": ["neutral", "hazard"]},
    },
}


class JsonStore:
    """Reads and writes the JSON interchange files."""

    def __init__(self, indent=Config.JSON_INDENT):
        self.indent = indent

    def _read(self, path, schema, kind):
        try:
            with open(path, encoding="utf-8") as fh:
                document = json.load(fh)
            jsonschema.validate(instance=document, schema=schema)
            return document
        except json.JSONDecodeError as e:
            logging.error(f"Malformed JSON in {path}: {e}")
            raise MdpFormatError(f"{path} is not valid JSON: {e}") from e
        except jsonschema.ValidationError as e:
            logging.error(f"Invalid {kind} file {path}: {e.message}")
            raise MdpFormatError(f"{path} is not a valid {kind} file: {e.message}") from e

    def write(self, path, document):
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8") as fh:
                json.dump(document, fh, indent=self.indent)
                fh.write("\n")
        except OSError as e:
            logging.error(f"Error writing {path}: {e}")
            raise e
        return path

    def load_mdp(self, path):
        document = self._read(path, MDP_SCHEMA, "MDP")
        try:
            mdp = FiniteMdp(document["next"])
            if (mdp.num_states, mdp.num_actions) != (document["num_states"], document["num_actions"]):
                raise MdpFormatError(
                    f"declared size ({document['num_states']}, {document['num_actions']}) does not match "
                    f"the transition table {mdp.next.shape}"
                )
            labels = {name: as_labels(values, mdp, name) for name, values in document["labels"].items()}
        except ReachError as e:
            logging.error(f"Rejected MDP file {path}: {e}")
            raise e
        return mdp, labels

    def mdp_document(self, mdp, labels):
        return {
            "num_states": mdp.num_states,
            "num_actions": mdp.num_actions,
            "next": mdp.next.tolist(),
            "labels": {name: np.asarray(labels[name]).tolist() for name in LABEL_NAMES if name in labels},
        }

    def save_mdp(self, path, mdp, labels):
        return self.write(path, self.mdp_document(mdp, labels))

    def save_values(self, path, values, report=None):
        document = {"values": np.asarray(values).tolist()}
        if report is not None:
            document["report"] = report.to_dict()
        return self.write(path, document)

    def load_grid_spec(self, path):
        document = self._read(path, GRID_SCHEMA, "grid spec")
        try:
            return GridSpec.from_dict(document)
        except ReachError as e:
            logging.error(f"Rejected grid spec {path}: {e}")
            raise e

    def save_grid_spec(self, path, spec):
        return self.write(path, spec.to_dict())


store = JsonStore()
