import os

from celery import Celery, group
from celery.utils.log import get_task_logger

from app.deformations import DeformationSpec, check_constraints, solve_first_order
from app.esoteric import EsotericSpec, check_esoteric
from app.standard_p import ParamSet, build_standard_P, check_braid, check_hecke, check_sl_condition, check_theorem2

logger = get_task_logger(__name__)

celery_app = Celery(
    "tasks",
    broker=os.getenv("CELERY_BROKER_URL", "redis://redis:6379/0"),
    backend=os.getenv("CELERY_RESULT_BACKEND", "redis://redis:6379/0"),
)


@celery_app.task
def standard_check_task(params_doc: dict):
    """Hecke, braid, theorem2 and sl reports for one parameter file."""
    params = ParamSet.from_json(params_doc)
    P = build_standard_P(params)
    logger.info("checking standard P for n=%d", params.n)
    return {
        "hecke": check_hecke(P, params.a).to_dict(),
        "braid": check_braid(P).to_dict(),
        "theorem2": check_theorem2(P, params.a).to_dict(),
        "sl": check_sl_condition(params).to_dict(),
    }


@celery_app.task
def constraint_check_task(params_doc: dict, spec_doc: dict):
    params = ParamSet.from_json(params_doc)
    spec = DeformationSpec.from_json(spec_doc)
    return check_constraints(params, spec).to_dict()


@celery_app.task
def first_order_task(params_doc: dict):
    params = ParamSet.from_json(params_doc)
    logger.info("solving first-order deformations for n=%d", params.n)
    return solve_first_order(params).to_dict()


@celery_app.task
def esoteric_check_task(spec_doc: dict, lambda_placement: str = "hecke"):
    spec = EsotericSpec.from_json(spec_doc)
    logger.info("checking esoteric gl(%d) with %s placement", spec.dimension, lambda_placement)
    return check_esoteric(spec, lambda_placement).to_dict()


def sweep_first_order(samples: list[dict]):
    """Fan the first-order solver out over parameter files."""
    return group(first_order_task.s(doc) for doc in samples)
