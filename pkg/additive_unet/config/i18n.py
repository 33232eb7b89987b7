"""Console labels in English and Chinese."""

# Chinese messages
MESSAGES_ZH = {
    "train": "训练",
    "eval": "评估",
    "sweep": "门控扫描",
    "spectra": "滤波器频谱",
    "table": "结果表",
    "denoise": "去噪",
    "fetch": "下载数据集",
    "selfcheck": "梯度自检",
    "model": "模型",
    "parameters": "参数量",
    "sigma": "噪声水平",
    "steps": "训练步数",
    "step": "步骤",
    "loss": "损失",
    "gates": "门控系数",
    "checkpoint": "检查点",
    "output_dir": "输出目录",
    "images": "图像数",
    "done": "完成",
    "elapsed": "耗时",
    "resumed_from": "从检查点继续",
    "centroid": "频谱质心",
    "passed": "通过",
    "failed": "失败",
}

# English messages
MESSAGES_EN = {
    "train": "Train",
    "eval": "Evaluate",
    "sweep": "Gate Sweep",
    "spectra": "Filter Spectra",
    "table": "Results Table",
    "denoise": "Denoise",
    "fetch": "Fetch Dataset",
    "selfcheck": "Gradient Self-Check",
    "model": "Model",
    "parameters": "Parameters",
    "sigma": "Sigma",
    "steps": "Steps",
    "step": "Step",
    "loss": "Loss",
    "gates": "Gates",
    "checkpoint": "Checkpoint",
    "output_dir": "Output Dir",
    "images": "Images",
    "done": "Done",
    "elapsed": "Elapsed",
    "resumed_from": "Resumed From",
    "centroid": "Spectral Centroid",
    "passed": "passed",
    "failed": "FAILED",
}


def get_messages(lang: str = "en") -> dict:
    """
    Get console labels by language.

    Args:
        lang: 'cn' for Chinese, anything else for English.
    """
    if lang == "cn":
        return MESSAGES_ZH
    return MESSAGES_EN


def get_message(key: str, lang: str = "en") -> str:
    return get_messages(lang).get(key, key)
