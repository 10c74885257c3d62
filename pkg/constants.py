#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import math

# Valores por defecto del bucle de entrenamiento
COLLECT_STEPS = 1000  # S: pasos recogidos entre actualizaciones
BATCH_STEPS = 5000  # B: longitud total de trayectorias muestreadas del buffer
REPLAY_STEPS = 50000  # L: capacidad del replay buffer en pasos
EPOCHS = 300  # P
TRUST_REGION_DELTA = 0.001  # delta del trust region
VALUE_LR = 2e-4  # learning rate de V, V_C y S_C
RISK_LEVEL = 0.125  # alpha (masa de cola del CVaR). 1.0 -> restricción en esperanza
COST_LIMIT = 0.025  # d, límite de coste por paso
DISCOUNT = 0.99
TRACE_DECAY = 0.97  # lambda del retrace
CRITIC_ROUNDS = 10  # pasos de Adam por red y por epoch
HIDDEN_WIDTH = 64  # se puede subir a 512 por config
HIDDEN_LAYERS = 2
CHECKPOINT_EVERY = 10  # epochs
EVAL_EPISODES = 10

# Trust region / LQCLP
CG_ITERS = 10
CG_TOL = 1e-8
DAMPING = 0.01
LINE_SEARCH_STEPS = 10
KL_TOLERANCE = 1.1  # KL medido <= 1.1 * delta_eff en pasos aceptados

# Límites numéricos
LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
RATIO_MIN = 1e-3  # ratios pi/mu recortados solo en g y b
RATIO_MAX = 1e3
VARIANCE_FLOOR = 1e-8  # suelo de J_S - J_C^2 antes de la raíz
BEHAVIOR_FLOOR = 1e-3  # suelo de las políticas de comportamiento del oráculo

# Métricas
CV_THRESHOLD = 0.5  # un paso es violación si coste >= 0.5

# Presets de coste logístico: (k, b, convención)
HAZARD_COST = (10.0, 0.2, "distance")  # distancia mínima a obstáculos
TORSO_ANGLE_COST = (10.0, math.pi / 4, "angle")  # |ángulo del torso|
COM_HEIGHT_COST = (15.0, 0.5, "distance")  # altura del centro de masas

# Valores del estudio de ablación del replay buffer
SWEEP_VALUES = {
    "batch": (2000, 5000, 10000),
    "collect": (500, 1000, 2000),
    "replay": (20000, 50000, 100000),
    "alpha": (0.125, 0.25, 0.5, 1.0),
}

# Códigos de salida de la CLI
EXIT_OK = 0
EXIT_VERIFY_FAILED = 2
EXIT_NUMERICAL_ABORT = 3

# Variable de entorno que fuerza la semilla
SEED_ENV = "OFFTRC_SEED"
