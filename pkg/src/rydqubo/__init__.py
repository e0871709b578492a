"""Grid-partitioned Rydberg-array MWIS solver for QUBO problems."""

from rydqubo.qubo import QuboMatrix, IsingDecomposition, energy, decompose, brute_force_solve, random_instance
from rydqubo.embedding import Vertex, UnitDiskGraph, EmbeddingReport, embed, edges
from rydqubo.partition import GridPartition, Subgraph, partition, extract_subgraphs
from rydqubo.ahs import DriveSchedule, InteractionModel, QuantumState, SubgraphSolution, solve_subgraph, exact_mwis
from rydqubo.merger import GlobalSolution, merge, finalize
from rydqubo.annealing import AnnealConfig, anneal
from rydqubo.pipeline import PipelineConfig, run_pipeline

__version__ = "0.1.0"
