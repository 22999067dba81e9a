from .knn import CLASSIFY, REGRESS, KnnModel, fit_knn, knn_predict
from .metrics import MeanCI, accuracy, mean_ci, rmse
