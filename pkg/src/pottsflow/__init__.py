"""Markov chains on ℤ_q-flows for sampling and counting the low-temperature Potts model."""

from .cycles import EvenGenSet, GenParams, SignedEvenSet, make_gen_set, params, verify_generates
from .flow_chain import FlowChainConfig, OutOfRange
from .flows import FlowState, zero_flow
from .graph import OrientedMultigraph, contract, delete, from_edge_list
from .joint_chain import JointChainConfig, JointState

__version__ = "0.1.0"

__all__ = [
    "EvenGenSet",
    "FlowChainConfig",
    "FlowState",
    "GenParams",
    "JointChainConfig",
    "JointState",
    "OrientedMultigraph",
    "OutOfRange",
    "SignedEvenSet",
    "contract",
    "delete",
    "from_edge_list",
    "make_gen_set",
    "params",
    "verify_generates",
    "zero_flow",
]
