"""The 30 printed (F_C1, F_C2, F_A) rows of the three ten-plan fitness tables.

Values are copied verbatim as printed, one table per agent. They serve as
frozen reference data for the legacy aggregation.
"""

ROWS = [
    # agent A1, plans 0..9
    ("A1", 0, 3.6583253244223507E-4, 0.01, 4.531462743252149E-5),
    ("A1", 1, 6.323401357583406E-4, 0.01, 7.781241907869489E-5),
    ("A1", 2, 5.897754111634356E-4, 0.01, 7.265073595371868E-5),
    ("A1", 3, 6.323401357583406E-4, 0.01, 7.781241907869489E-5),
    ("A1", 4, 5.77533185332251E-4, 0.027777777777777776, 7.181835083820729E-5),
    ("A1", 5, 3.9932094414700796E-4, 0.011363636363636364, 4.9480429438769634E-5),
    ("A1", 6, 4.143145586936494E-4, 0.01, 5.1258392381236724E-5),
    ("A1", 7, 4.143145586936494E-4, 0.01, 5.1258392381236724E-5),
    ("A1", 8, 3.7730500878527685E-4, 0.00980392156862745, 4.6713680801655446E-5),
    ("A1", 9, 3.689321454479055E-4, 0.011111111111111112, 4.573685774725651E-5),
    # agent A2
    ("A2", 0, 2.1472768420252827E-4, 0.00641025641025641, 2.6618050860961023E-5),
    ("A2", 1, 2.6595279043151345E-4, 0.00641025641025641, 3.290282547228916E-5),
    ("A2", 2, 3.116105495296216E-4, 0.00641025641025641, 3.8483634339865544E-5),
    ("A2", 3, 2.705071325893138E-4, 0.00641025641025641, 3.346039186200589E-5),
    ("A2", 4, 3.8486730545899116E-4, 0.006756756756756757, 4.743296349885949E-5),
    ("A2", 5, 3.385426476167838E-4, 0.006535947712418301, 4.177685179203307E-5),
    ("A2", 6, 2.6005714273620996E-4, 0.008264462809917356, 3.2253413988792484E-5),
    ("A2", 7, 2.2290002356262293E-4, 0.006024096385542169, 2.7607127328053214E-5),
    ("A2", 8, 4.1487733971837395E-4, 0.011111111111111112, 5.138004806751753E-5),
    ("A2", 9, 3.0030781367048617E-4, 0.008333333333333333, 3.7203303427402686E-5),
    # agent A3
    ("A3", 0, 6.186662433765832E-4, 0.020833333333333332, 7.676338940901854E-5),
    ("A3", 1, 5.678571076814047E-4, 0.020833333333333332, 7.050171962903428E-5),
    ("A3", 2, 6.662723350575081E-4, 0.020833333333333332, 8.262344529228388E-5),
    ("A3", 3, 6.186662433765832E-4, 0.020833333333333332, 7.676338940901854E-5),
    ("A3", 4, 6.662723350575081E-4, 0.020833333333333332, 8.262344529228388E-5),
    ("A3", 5, 4.727751919925607E-4, 0.020833333333333332, 5.876351580944249E-5),
    ("A3", 6, 6.662723350575081E-4, 0.020833333333333332, 8.262344529228388E-5),
    ("A3", 7, 6.662723350575081E-4, 0.020833333333333332, 8.262344529228388E-5),
    ("A3", 8, 4.290402414243473E-4, 0.020833333333333332, 5.33533116805599E-5),
    ("A3", 9, 6.967986411053363E-4, 0.02, 8.6347742765399E-5),
]
